#include "raic/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace raic {
namespace {

constexpr double kCubicMetresToCm3 = 1e6;
constexpr double kMaxJamSiteTravel = 5.0;  // m of travel covered by pre-drawn sites

void require(bool ok, const std::string& field, double value, const char* expected) {
  if (!ok) {
    std::ostringstream msg;
    msg << field << " = " << value << " is out of range; expected " << expected;
    throw std::invalid_argument(msg.str());
  }
}

// Uniform double in [0, 1) from the top 53 bits; mt19937_64 output is fixed by
// the standard, so the draw sequence is portable.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Edge {
  Vec3 tip;
  Vec3 lateral;  // unit, along the edge (tilted by roll)
  Vec3 forward;  // unit horizontal heading
};

Edge edge_of(const Pose& scoop) {
  const EulerAngles e = euler_zyx(scoop.rotation);
  const Vec3 heading(std::cos(e.yaw), std::sin(e.yaw), 0.0);
  const Vec3 side(-std::sin(e.yaw), std::cos(e.yaw), 0.0);
  return Edge{scoop.position, std::cos(e.roll) * side + std::sin(e.roll) * Vec3::UnitZ(), heading};
}

template <typename F>
void for_each_edge_point(const Pose& scoop, const ScoopGeometry& g, F&& fn) {
  const Edge edge = edge_of(scoop);
  const int n = std::max(g.edge_samples, 2);
  for (int k = 0; k < n; ++k) {
    const double y = -0.5 * g.width + g.width * static_cast<double>(k) / (n - 1);
    fn(edge.tip + y * edge.lateral, edge.forward);
  }
}

}  // namespace

std::string_view to_string(Material m) {
  switch (m) {
    case Material::Pebbles: return "Pebbles";
    case Material::Gravel: return "Gravel";
    case Material::Slate: return "Slate";
    case Material::Mulch: return "Mulch";
  }
  return "unknown";
}

std::optional<Material> material_from_string(std::string_view name) {
  for (Material m : {Material::Pebbles, Material::Gravel, Material::Slate, Material::Mulch}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

void TerrainModel::validate() const {
  require(std::isfinite(surface_height), "surface_height", surface_height, "finite");
  require(resistance_stiffness > 0.0, "resistance_stiffness", resistance_stiffness, "> 0");
  require(drag_friction > 0.0, "drag_friction", drag_friction, "> 0");
  require(rotational_drag > 0.0, "rotational_drag", rotational_drag, "> 0");
  require(jam_onset_threshold > 0.0, "jam_onset_threshold", jam_onset_threshold, "> 0");
  require(jam_stiffness > 0.0, "jam_stiffness", jam_stiffness, "> 0");
  require(jam_release_travel >= 0.0, "jam_release_travel", jam_release_travel, ">= 0");
  require(jam_density >= 0.0, "jam_density", jam_density, ">= 0");
  require(capture_efficiency > 0.0 && capture_efficiency <= 1.0, "capture_efficiency",
          capture_efficiency, "(0, 1]");
  require(spill_roll_threshold > 0.0, "spill_roll_threshold", spill_roll_threshold, "> 0");
}

TerrainModel terrain_preset(Material material) {
  TerrainModel m;
  m.name = std::string(to_string(material));
  switch (material) {
    case Material::Pebbles:
      m.resistance_stiffness = 150.0;
      m.drag_friction = 1500.0;
      m.rotational_drag = 20.0;
      m.jam_onset_threshold = 10.0;
      m.jam_stiffness = 1500.0;
      m.jam_release_travel = 0.2;
      m.jam_density = 0.0;
      m.capture_efficiency = 0.9;
      m.spill_roll_threshold = 0.4;
      break;
    case Material::Gravel:
      m.resistance_stiffness = 250.0;
      m.drag_friction = 3500.0;
      m.rotational_drag = 50.0;
      m.jam_onset_threshold = 5.0;
      m.jam_stiffness = 2500.0;
      m.jam_release_travel = 0.3;
      m.jam_density = 8.0;
      m.capture_efficiency = 0.8;
      m.spill_roll_threshold = 0.4;
      break;
    case Material::Slate:
      m.resistance_stiffness = 300.0;
      m.drag_friction = 4000.0;
      m.rotational_drag = 60.0;
      m.jam_onset_threshold = 5.0;
      m.jam_stiffness = 3000.0;
      m.jam_release_travel = 0.3;
      m.jam_density = 12.0;
      m.capture_efficiency = 0.8;
      m.spill_roll_threshold = 0.4;
      break;
    case Material::Mulch:
      m.resistance_stiffness = 200.0;
      m.drag_friction = 3000.0;
      m.rotational_drag = 40.0;
      m.jam_onset_threshold = 8.0;
      m.jam_stiffness = 1500.0;
      m.jam_release_travel = 0.4;
      m.jam_density = 3.0;
      m.capture_efficiency = 0.7;
      m.spill_roll_threshold = 0.4;
      break;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Heightmap

Heightmap::Heightmap(const TerrainBox& box, double surface_height)
    : box_(box), cell_(box.cell_size) {
  if (!(box.cell_size > 0.0) || !(box.x_size > 0.0) || !(box.y_size > 0.0)) {
    throw std::invalid_argument("terrain box dimensions and cell size must be > 0");
  }
  nx_ = static_cast<int>(std::lround(box.x_size / cell_));
  ny_ = static_cast<int>(std::lround(box.y_size / cell_));
  heights_.assign(static_cast<std::size_t>(nx_) * ny_, surface_height);
}

std::optional<std::size_t> Heightmap::cell_at(double x, double y) const {
  const double fx = (x - box_.x_min) / cell_;
  const double fy = (y - box_.y_min) / cell_;
  if (!(fx >= 0.0 && fy >= 0.0)) return std::nullopt;
  const auto i = static_cast<long>(fx);
  const auto j = static_cast<long>(fy);
  if (i >= nx_ || j >= ny_) return std::nullopt;
  return static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i);
}

double Heightmap::height_at(double x, double y) const {
  const auto c = cell_at(x, y);
  return c ? heights_[*c] : -std::numeric_limits<double>::infinity();
}

Vec3 Heightmap::cell_center(std::size_t index) const {
  const auto i = static_cast<double>(index % nx_);
  const auto j = static_cast<double>(index / nx_);
  return Vec3(box_.x_min + (i + 0.5) * cell_, box_.y_min + (j + 0.5) * cell_, heights_[index]);
}

// ---------------------------------------------------------------------------
// Obstacles

ObstacleModel ObstacleModel::slope(const Vec3& foot, double heading, double incline,
                                   double top_height, double contact_stiffness) {
  ObstacleModel o;
  o.kind = Kind::RigidSlope;
  const Vec3 forward(std::cos(heading), std::sin(heading), 0.0);
  o.normal = -std::sin(incline) * forward + std::cos(incline) * Vec3::UnitZ();
  o.offset = o.normal.dot(foot);
  o.top_height = top_height;
  o.contact_stiffness = contact_stiffness;
  return o;
}

ObstacleModel ObstacleModel::rock(const Vec3& center, double radius, double contact_stiffness) {
  ObstacleModel o;
  o.kind = Kind::BuriedRock;
  o.center = center;
  o.radius = radius;
  o.contact_stiffness = contact_stiffness;
  return o;
}

double ObstacleModel::penetration(const Vec3& p, Vec3* n) const {
  if (kind == Kind::BuriedRock) {
    const Vec3 r = p - center;
    const double dist = r.norm();
    if (n) *n = dist > 0.0 ? Vec3(r / dist) : Vec3(Vec3::UnitZ());
    return radius - dist;
  }
  const double face = offset - normal.dot(p);
  const double top = top_height - p.z();
  if (face <= top) {
    if (n) *n = normal;
    return std::min(face, top);
  }
  if (n) *n = Vec3::UnitZ();
  return top;
}

void ObstacleModel::validate(const TerrainModel& terrain) const {
  if (!(contact_stiffness >= 100.0 * terrain.resistance_stiffness)) {
    std::ostringstream msg;
    msg << "obstacle contact_stiffness = " << contact_stiffness
        << " must be at least 100x the terrain resistance_stiffness ("
        << 100.0 * terrain.resistance_stiffness << ")";
    throw std::invalid_argument(msg.str());
  }
  if (kind == Kind::BuriedRock) {
    require(radius > 0.0, "radius", radius, "> 0");
  } else {
    require(std::abs(normal.norm() - 1.0) < 1e-9, "normal norm", normal.norm(), "1");
  }
}

std::string_view to_string(ObstacleModel::Kind kind) {
  return kind == ObstacleModel::Kind::BuriedRock ? "rock" : "slope";
}

// ---------------------------------------------------------------------------
// State and forces

TerrainState make_terrain_state(const TerrainModel& model, const TerrainBox& box) {
  model.validate();
  TerrainState s;
  s.heightmap = Heightmap(box, model.surface_height);
  if (model.jam_density > 0.0) {
    std::mt19937_64 rng(model.rng_seed);
    double travel = 0.0;
    while (true) {
      travel += -std::log1p(-uniform01(rng)) / model.jam_density;
      if (travel > kMaxJamSiteTravel) break;
      s.jam_sites.push_back(travel);
    }
  }
  return s;
}

double effective_depth(const TerrainState& state, const Pose& scoop, const TerrainModel&,
                       const ScoopGeometry& g) {
  double sum = 0.0;
  int n = 0;
  for_each_edge_point(scoop, g, [&](const Vec3& p, const Vec3& forward) {
    const Vec3 ahead = p + g.lookahead * forward;
    const double surface = state.heightmap.height_at(ahead.x(), ahead.y());
    if (surface > p.z()) sum += surface - p.z();
    ++n;
  });
  return n > 0 ? sum / n : 0.0;
}

WrenchComponents terrain_wrench_components(const TerrainState& state, const Pose& scoop,
                                           const Vec6& velocity, const TerrainModel& model,
                                           std::span<const ObstacleModel> obstacles,
                                           const ScoopGeometry& g) {
  WrenchComponents w;
  const double depth = effective_depth(state, scoop, model, g);
  w.depth = depth;
  const Vec3 linear = velocity.head<3>();
  const Vec3 angular = velocity.tail<3>();

  if (depth > 0.0) {
    w.elastic.force = Vec3(0.0, 0.0, model.resistance_stiffness * depth);
    const Vec3 horizontal(linear.x(), linear.y(), 0.0);
    w.drag.force = -model.drag_friction * depth * horizontal;
    w.rotational.torque = -model.rotational_drag * depth * angular;
  }

  if (state.jam_active) {
    const double advance = (scoop.position - state.jam_anchor.position).dot(state.jam_direction);
    if (advance > 0.0) w.jam.force = -model.jam_stiffness * advance * state.jam_direction;
  }

  for (const ObstacleModel& o : obstacles) {
    Vec3 n;
    const double pen = o.penetration(scoop.position, &n);
    if (pen > 0.0) w.obstacle.force += o.contact_stiffness * pen * n;
  }
  return w;
}

Wrench terrain_wrench(const TerrainState& state, const Pose& scoop, const Vec6& velocity,
                      const TerrainModel& model, std::span<const ObstacleModel> obstacles,
                      const ScoopGeometry& g) {
  return terrain_wrench_components(state, scoop, velocity, model, obstacles, g).total();
}

double travel_resistance(const WrenchComponents& w, const Vec6& velocity) {
  const Vec3 linear = velocity.head<3>();
  const double speed = linear.norm();
  if (speed < 1e-9) return 0.0;
  return -(w.elastic.force + w.drag.force).dot(linear / speed);
}

void jam_update(TerrainState& state, const Pose& scoop, const Vec6& velocity, double resistance,
                const TerrainModel& model, const ScoopGeometry& g) {
  const double depth = effective_depth(state, scoop, model, g);
  const std::optional<Pose> last = state.last_pose;
  state.last_pose = scoop;

  if (depth <= 0.0) {
    // Out of the material: nothing left to jam against.
    state.jam_active = false;
    return;
  }
  if (last) state.travel_in_material += (scoop.position - last->position).norm();
  while (state.next_jam_site < state.jam_sites.size() &&
         state.travel_in_material >= state.jam_sites[state.next_jam_site]) {
    state.jam_armed = true;
    ++state.next_jam_site;
  }

  if (state.jam_active) {
    if (last) {
      const EulerAngles now = euler_zyx(scoop.rotation);
      const EulerAngles before = euler_zyx(last->rotation);
      state.transverse_travel_since_jam +=
          std::abs(wrap_angle(now.yaw - before.yaw)) + std::abs(wrap_angle(now.roll - before.roll));
    }
  } else if (state.jam_armed && resistance >= model.jam_onset_threshold) {
    state.jam_active = true;
    state.jam_armed = false;
    state.jam_anchor = scoop;
    state.transverse_travel_since_jam = 0.0;
    ++state.jam_count;
    const Vec3 linear = velocity.head<3>();
    if (linear.norm() > 1e-9) {
      state.jam_direction = linear.normalized();
    } else {
      const EulerAngles e = euler_zyx(scoop.rotation);
      state.jam_direction = Vec3(std::cos(e.yaw), std::sin(e.yaw), 0.0);
    }
  }
  if (state.jam_active && state.transverse_travel_since_jam >= model.jam_release_travel) {
    state.jam_active = false;
  }
}

void excavate_update(TerrainState& state, const Pose& scoop, double roll,
                     const TerrainModel& model, const ScoopGeometry& g) {
  const double area = state.heightmap.cell_area();
  const double efficiency = std::abs(roll) > model.spill_roll_threshold
                                ? 0.5 * model.capture_efficiency
                                : model.capture_efficiency;
  for_each_edge_point(scoop, g, [&](const Vec3& p, const Vec3&) {
    const auto cell = state.heightmap.cell_at(p.x(), p.y());
    if (!cell) return;
    double& h = state.heightmap.at(*cell);
    if (h > p.z()) {
      const double removed = (h - p.z()) * area * kCubicMetresToCm3;
      h = p.z();
      state.removed_volume += removed;
      state.captured_volume += removed * efficiency;
    }
  });
}

}  // namespace raic
