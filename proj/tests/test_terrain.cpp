#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "raic/terrain.hpp"
#include "raic/trajectory.hpp"

namespace {

using namespace raic;
constexpr double kPi = std::numbers::pi;
constexpr double kDt = 0.008;

TerrainModel test_model() {
  TerrainModel m = terrain_preset(Material::Gravel);
  m.resistance_stiffness = 400.0;
  m.jam_density = 0.0;
  m.capture_efficiency = 1.0;
  return m;
}

Pose scoop_at(const Vec3& p, double yaw = 0.0, double pitch = 0.0, double roll = 0.0) {
  return Pose{compose_euler(yaw, pitch, roll), p};
}

// Straight plain-PDS cut with the tip on y = y0.
std::vector<Pose> pds_cut(double y0) {
  PdsParams pds;
  pds.start = Vec3(0.2, y0, 0.0);
  const TrajectoryPlan plan = generate_pds_plan(pds);
  std::vector<Pose> poses;
  for (const PlanSample& s : plan.samples) {
    if (s.phase != Phase::Scoop) poses.push_back(s.pose);
  }
  return poses;
}

TEST(Presets, ValidAndNamed) {
  for (Material m : {Material::Pebbles, Material::Gravel, Material::Slate, Material::Mulch}) {
    const TerrainModel t = terrain_preset(m);
    EXPECT_NO_THROW(t.validate());
    EXPECT_EQ(material_from_string(t.name), m);
  }
  EXPECT_FALSE(material_from_string("Sand").has_value());
  // Jam-prone ordering of the presets.
  EXPECT_GT(terrain_preset(Material::Slate).jam_density,
            terrain_preset(Material::Gravel).jam_density);
  EXPECT_GT(terrain_preset(Material::Gravel).jam_density,
            terrain_preset(Material::Mulch).jam_density);
  EXPECT_GT(terrain_preset(Material::Mulch).jam_density,
            terrain_preset(Material::Pebbles).jam_density);
}

TEST(Presets, ValidationRejectsBadConstants) {
  TerrainModel m = test_model();
  m.capture_efficiency = 1.2;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = test_model();
  m.resistance_stiffness = 0.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(Heightmap, GridAndLookup) {
  const Heightmap h(TerrainBox{}, 0.0);
  EXPECT_EQ(h.nx(), 180);
  EXPECT_EQ(h.ny(), 120);
  EXPECT_EQ(h.height_at(0.4, 0.0), 0.0);
  EXPECT_TRUE(std::isinf(h.height_at(-0.01, 0.0)));
  EXPECT_TRUE(std::isinf(h.height_at(0.4, 0.31)));
  const auto c = h.cell_at(0.0026, -0.2999);
  ASSERT_TRUE(c.has_value());
  EXPECT_LT((h.cell_center(*c) - Vec3(0.0025, -0.2975, 0.0)).norm(), 1e-15);
}

TEST(Wrench, ZeroAboveSurface) {
  const TerrainModel m = test_model();
  const TerrainState s = make_terrain_state(m);
  Vec6 v;
  v << 0.05, 0.01, -0.02, 0.3, 0.2, 0.1;
  // The rolled edge dips 0.05 sin(0.1) m below the tip.
  for (double z : {0.006, 0.01, 0.2}) {
    const Wrench w = terrain_wrench(s, scoop_at(Vec3(0.4, 0.0, z), 0.2, -0.5, 0.1), v, m, {});
    EXPECT_EQ(w.as_vector(), Vec6::Zero()) << z;
  }
  EXPECT_EQ(terrain_wrench(s, scoop_at(Vec3(0.4, 0.0, 0.0)), v, m, {}).as_vector(), Vec6::Zero());
}

TEST(Wrench, StaticElasticForce) {
  const TerrainModel m = test_model();
  const TerrainState s = make_terrain_state(m);
  const Wrench w = terrain_wrench(s, scoop_at(Vec3(0.4, 0.0, -0.05)), Vec6::Zero(), m, {});
  EXPECT_NEAR(w.force.z(), 400.0 * 0.05, 1e-12);
  EXPECT_EQ(w.force.x(), 0.0);
  EXPECT_EQ(w.force.y(), 0.0);
  EXPECT_EQ(w.torque, Vec3::Zero());
}

TEST(Wrench, ContactProxyScalesWithEngagedWidth) {
  const TerrainModel m = test_model();
  const TerrainState s = make_terrain_state(m);
  // Edge centred on the box's +y wall: 21 of 41 samples over material.
  const Wrench w = terrain_wrench(s, scoop_at(Vec3(0.4, 0.29999, -0.05)), Vec6::Zero(), m, {});
  EXPECT_NEAR(w.force.z(), 400.0 * 0.05 * 21.0 / 41.0, 1e-9);
}

TEST(Wrench, DragOpposesHorizontalVelocity) {
  const TerrainModel m = test_model();
  const TerrainState s = make_terrain_state(m);
  Vec6 v = Vec6::Zero();
  v.head<3>() = Vec3(0.05, -0.02, -0.03);
  const WrenchComponents c =
      terrain_wrench_components(s, scoop_at(Vec3(0.4, 0.0, -0.04)), v, m, {});
  EXPECT_NEAR(c.depth, 0.04, 1e-12);
  EXPECT_LT((c.drag.force - (-m.drag_friction * 0.04 * Vec3(0.05, -0.02, 0.0))).norm(), 1e-12);
  EXPECT_NEAR(travel_resistance(c, v),
              -(c.elastic.force + c.drag.force).dot(v.head<3>().normalized()), 1e-12);
}

TEST(Wrench, ElasticTermIsPassive) {
  const TerrainModel m = test_model();
  const TerrainState s = make_terrain_state(m);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> x(0.1, 0.8), y(-0.2, 0.2), z(-0.1, 0.02), a(-0.6, 0.6);
  for (int i = 0; i < 500; ++i) {
    const WrenchComponents c = terrain_wrench_components(
        s, scoop_at(Vec3(x(rng), y(rng), z(rng)), a(rng), a(rng), a(rng)), Vec6::Zero(), m, {});
    // Penetration is downward; the elastic force never points along it.
    EXPECT_LE(c.elastic.force.dot(-Vec3::UnitZ()), 0.0);
    EXPECT_EQ(c.elastic.force.head<2>(), Eigen::Vector2d::Zero());
  }
}

TEST(Jam, SpringExample) {
  TerrainModel m = test_model();
  m.jam_stiffness = 2000.0;
  TerrainState s = make_terrain_state(m);
  s.jam_active = true;
  s.jam_anchor = scoop_at(Vec3(0.3, 0.0, -0.05));
  s.jam_direction = Vec3::UnitX();
  const WrenchComponents c =
      terrain_wrench_components(s, scoop_at(Vec3(0.4, 0.0, -0.05)), Vec6::Zero(), m, {});
  EXPECT_NEAR(c.jam.force.x(), -200.0, 1e-9);
  EXPECT_NEAR(c.jam.force.tail<2>().norm(), 0.0, 1e-12);
}

TEST(Jam, ForceMonotoneInDisplacement) {
  TerrainModel m = test_model();
  TerrainState s = make_terrain_state(m);
  s.jam_active = true;
  s.jam_anchor = scoop_at(Vec3(0.3, 0.0, -0.05));
  s.jam_direction = Vec3(1.0, 1.0, 0.0).normalized();
  double prev = 0.0;
  for (double d = 0.0; d < 0.2; d += 0.001) {
    const Vec3 p = s.jam_anchor.position + d * s.jam_direction;
    const double f =
        terrain_wrench_components(s, scoop_at(p), Vec6::Zero(), m, {}).jam.force.norm();
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(Jam, SitesArePoissonAndSeeded) {
  TerrainModel m = terrain_preset(Material::Slate);
  m.rng_seed = 42;
  const TerrainState a = make_terrain_state(m);
  const TerrainState b = make_terrain_state(m);
  EXPECT_EQ(a.jam_sites, b.jam_sites);
  EXPECT_TRUE(std::is_sorted(a.jam_sites.begin(), a.jam_sites.end()));
  m.rng_seed = 43;
  EXPECT_NE(make_terrain_state(m).jam_sites, a.jam_sites);

  // Mean count over many seeds is density * covered travel.
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    m.rng_seed = seed;
    total += static_cast<double>(make_terrain_state(m).jam_sites.size());
  }
  EXPECT_NEAR(total / 400.0, m.jam_density * 5.0, 1.0);
  EXPECT_TRUE(make_terrain_state(terrain_preset(Material::Pebbles)).jam_sites.empty());
}

TEST(Jam, ZeroReleaseTravelReleasesImmediately) {
  TerrainModel m = test_model();
  m.jam_release_travel = 0.0;
  TerrainState s = make_terrain_state(m);
  s.jam_armed = true;
  Vec6 v = Vec6::Zero();
  v[0] = 0.05;
  jam_update(s, scoop_at(Vec3(0.4, 0.0, -0.05)), v, 100.0, m);
  EXPECT_EQ(s.jam_count, 1);
  EXPECT_FALSE(s.jam_active);
}

TEST(Jam, EngagesOnlyWhenArmedAndLoaded) {
  TerrainModel m = test_model();
  TerrainState s = make_terrain_state(m);
  Vec6 v = Vec6::Zero();
  v[0] = 0.05;
  const Pose p = scoop_at(Vec3(0.4, 0.0, -0.05));
  jam_update(s, p, v, 1e3, m);
  EXPECT_FALSE(s.jam_active);  // not armed
  s.jam_armed = true;
  jam_update(s, p, v, 0.5 * m.jam_onset_threshold, m);
  EXPECT_FALSE(s.jam_active);  // below onset
  jam_update(s, p, v, m.jam_onset_threshold, m);
  EXPECT_TRUE(s.jam_active);
  EXPECT_EQ(s.jam_direction, Vec3::UnitX());
  // Leaving the material clears the jam.
  jam_update(s, scoop_at(Vec3(0.4, 0.0, 0.01)), v, 0.0, m);
  EXPECT_FALSE(s.jam_active);
}

TEST(Jam, PersistsWithoutOscillation) {
  TerrainModel m = test_model();
  TerrainState s = make_terrain_state(m);
  s.jam_armed = true;
  Vec6 v = Vec6::Zero();
  v[0] = 0.05;
  double prev = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Pose p = scoop_at(Vec3(0.3 + 0.05 * kDt * k, 0.0, -0.05));
    jam_update(s, p, v, 1e3, m);
    ASSERT_TRUE(s.jam_active);
    const double f = terrain_wrench_components(s, p, v, m, {}).jam.force.norm();
    EXPECT_GE(f, prev);
    prev = f;
  }
  EXPECT_GT(prev, 60.0);
}

TEST(Jam, SwivelReleasesWithinOnePeriod) {
  for (double amplitude : {kPi / 16, kPi / 8, 3 * kPi / 16}) {
    for (double omega : {kPi, 2 * kPi, 4 * kPi}) {
      TerrainModel m = test_model();
      m.jam_release_travel = 2 * amplitude;
      TerrainState s = make_terrain_state(m);
      s.jam_armed = true;
      Vec6 v = Vec6::Zero();
      v[0] = 0.05;
      const double period = 2 * kPi / omega;
      const int steps = static_cast<int>(std::ceil(period / kDt));
      int released_at = -1;
      for (int k = 0; k <= steps; ++k) {
        const double yaw = swivel_angle(k * kDt, amplitude, omega);
        jam_update(s, scoop_at(Vec3(0.3 + 0.05 * kDt * k, 0.0, -0.05), yaw), v, 1e3, m);
        if (k > 0 && !s.jam_active) {
          released_at = k;
          break;
        }
      }
      EXPECT_GT(released_at, 0) << amplitude << " " << omega;
      EXPECT_LE(released_at * kDt, period + 1e-12);
    }
  }
}

TEST(Obstacles, RockAndSlopePenetration) {
  const ObstacleModel rock = ObstacleModel::rock(Vec3(0.4, 0.0, -0.06), 0.04, 1e5);
  Vec3 n;
  EXPECT_NEAR(rock.penetration(Vec3(0.4, 0.0, -0.03), &n), 0.01, 1e-15);
  EXPECT_LT((n - Vec3::UnitZ()).norm(), 1e-15);
  EXPECT_LT(rock.penetration(Vec3(0.5, 0.0, -0.06), nullptr), 0.0);

  const ObstacleModel slope = ObstacleModel::slope(Vec3(0.45, 0, -0.07), 0.0, kPi / 4, -0.01, 1e5);
  // A point 1 cm horizontally into a 45 degree face is 1/sqrt(2) cm deep.
  EXPECT_NEAR(slope.penetration(Vec3(0.46, 0, -0.07), &n), 0.01 / std::sqrt(2.0), 1e-12);
  EXPECT_LT((n - Vec3(-1, 0, 1).normalized()).norm(), 1e-12);
  EXPECT_LT(slope.penetration(Vec3(0.44, 0, -0.07), nullptr), 0.0);
  EXPECT_LT(slope.penetration(Vec3(0.6, 0, 0.0), nullptr), 0.0);  // above the cap

  const TerrainModel m = test_model();
  const TerrainState s = make_terrain_state(m);
  const std::vector<ObstacleModel> obstacles{rock};
  const WrenchComponents c = terrain_wrench_components(s, scoop_at(Vec3(0.4, 0.0, -0.03)),
                                                       Vec6::Zero(), m, obstacles);
  EXPECT_NEAR(c.obstacle.force.z(), 1e5 * 0.01, 1e-6);

  ObstacleModel soft = rock;
  soft.contact_stiffness = 10.0 * m.resistance_stiffness;
  EXPECT_THROW(soft.validate(m), std::invalid_argument);
  EXPECT_NO_THROW(rock.validate(m));
}

TEST(Excavation, AboveSurfaceRemovesNothing) {
  const TerrainModel m = test_model();
  TerrainState s = make_terrain_state(m);
  for (const Pose& p : pds_cut(0.0)) {
    Pose lifted = p;
    lifted.position.z() = 0.01;
    excavate_update(s, lifted, 0.0, m);
  }
  EXPECT_EQ(s.captured_volume, 0.0);
  EXPECT_EQ(s.removed_volume, 0.0);
}

TEST(Excavation, HeightsOnlyDecreaseAndCaptureIsBounded) {
  TerrainModel m = test_model();
  m.capture_efficiency = 0.7;
  TerrainState s = make_terrain_state(m);
  std::vector<double> before = s.heightmap.heights();
  double captured = 0.0;
  for (const Pose& p : pds_cut(0.05)) {
    excavate_update(s, p, 0.0, m);
    const std::vector<double>& after = s.heightmap.heights();
    for (std::size_t i = 0; i < after.size(); ++i) ASSERT_LE(after[i], before[i]);
    before = after;
    EXPECT_GE(s.captured_volume, captured);
    captured = s.captured_volume;
    EXPECT_LE(s.captured_volume, s.removed_volume);
  }
  EXPECT_NEAR(s.captured_volume, 0.7 * s.removed_volume, 1e-9 * s.removed_volume);
}

TEST(Excavation, SpillHalvesCapture) {
  TerrainModel m = test_model();
  TerrainState a = make_terrain_state(m), b = make_terrain_state(m);
  for (const Pose& p : pds_cut(0.0)) {
    excavate_update(a, p, 0.0, m);
    excavate_update(b, p, m.spill_roll_threshold + 0.01, m);
  }
  EXPECT_EQ(a.removed_volume, b.removed_volume);
  EXPECT_NEAR(b.captured_volume, 0.5 * a.captured_volume, 1e-9 * a.captured_volume);
}

TEST(Excavation, VolumeMatchesSweptPrismOracle) {
  const double y0 = 0.0012;  // edge ends fall strictly inside grid cells
  const TerrainModel m = test_model();
  TerrainState s = make_terrain_state(m);
  for (const Pose& p : pds_cut(y0)) excavate_update(s, p, 0.0, m);

  // Oracle: every 5 mm cell the edge band overlaps is cut to the lowest
  // point of the tip path over the cell's x extent.
  PdsParams pds;
  pds.start = Vec3(0.2, y0, 0.0);
  const double x0 = pds.start.x(), x1 = pds.drag_start().x(), x2 = pds.drag_end().x();
  const auto path_z = [&](double x) {
    return x < x1 ? -pds.depth * (x - x0) / (x1 - x0) : -pds.depth;
  };
  const TerrainBox box;
  double oracle = 0.0;
  for (int j = 0; j * box.cell_size < box.y_size; ++j) {
    const double ya = box.y_min + j * box.cell_size, yb = ya + box.cell_size;
    if (yb <= y0 - 0.05 || ya > y0 + 0.05) continue;
    for (int i = 0; i * box.cell_size < box.x_size; ++i) {
      const double xa = box.x_min + i * box.cell_size, xb = xa + box.cell_size;
      if (xb <= x0 || xa > x2) continue;
      const double lowest = path_z(std::min(xb, x2));
      oracle += -lowest * box.cell_size * box.cell_size * 1e6;
    }
  }
  EXPECT_NEAR(s.captured_volume, oracle, 0.01 * oracle);
  // Within a few percent of the continuous prism: width x cut cross-section.
  const double prism = 0.1 * (0.5 * pds.depth * (x1 - x0) + pds.depth * pds.drag_length) * 1e6;
  EXPECT_NEAR(s.captured_volume, prism, 0.1 * prism);
}

TEST(Terrain, DeterministicForSeedAndPoses) {
  const auto run = [](std::uint64_t seed) {
    TerrainModel m = terrain_preset(Material::Slate);
    m.rng_seed = seed;
    TerrainState s = make_terrain_state(m);
    std::vector<Vec6> wrenches;
    PrimitiveParams prim;
    prim.swivel_amplitude = kPi / 8;
    prim.swivel_frequency = kPi;
    const TrajectoryPlan plan = generate_plan(PdsParams{}, prim);
    Pose last = plan[0].pose;
    for (const PlanSample& p : plan.samples) {
      Vec6 v = pose_difference(p.pose, last).to_wrench_order() / kDt;
      const WrenchComponents c = terrain_wrench_components(s, p.pose, v, m, {});
      wrenches.push_back(c.total().as_vector());
      jam_update(s, p.pose, v, travel_resistance(c, v), m);
      excavate_update(s, p.pose, p.angles.roll, m);
      last = p.pose;
    }
    return std::make_pair(wrenches, s.captured_volume);
  };
  const auto a = run(5), b = run(5);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_NE(run(6).first, a.first);
}

}  // namespace
