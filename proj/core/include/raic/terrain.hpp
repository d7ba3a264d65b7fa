#pragma once

// Deterministic terrain plant for closed-loop excavation runs.
//
// The scoop is reduced to its cutting edge: a segment `width` wide through the
// tip, perpendicular to the heading and tilted by the roll. Resistance comes
// from
//   - elastic penetration: k_t * effective depth, pushing up;
//   - drag friction: mu_t * effective depth * horizontal velocity, opposing it;
//   - rotational drag: mu_r * effective depth * angular velocity, opposing it;
//   - jamming: an anchored spring along the travel direction, engaged at
//     seeded sites and released by accumulated yaw/roll travel;
//   - rigid obstacles: penalty contact at the tip.
// Effective depth is the edge's depth below the material just ahead of it,
// averaged across the edge width (disengaged parts count as zero).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "raic/geometry.hpp"

namespace raic {

enum class Material { Pebbles, Gravel, Slate, Mulch };

std::string_view to_string(Material material);
std::optional<Material> material_from_string(std::string_view name);

struct TerrainModel {
  std::string name = "custom";
  double surface_height = 0.0;        // m
  double resistance_stiffness = 0.0;  // k_t, N per m of effective depth
  double drag_friction = 0.0;         // mu_t, N per (m/s) per m of depth
  double rotational_drag = 0.0;       // mu_r, N m per (rad/s) per m of depth
  double jam_onset_threshold = 1.0;   // N, resistance along travel that engages an armed jam
  double jam_stiffness = 1.0;         // N/m
  double jam_release_travel = 0.0;    // rad of accumulated |dyaw| + |droll|
  double jam_density = 0.0;           // armed jam sites per m travelled in material
  double capture_efficiency = 1.0;    // eta in (0, 1]
  double spill_roll_threshold = 1.0;  // rad
  std::uint64_t rng_seed = 0;

  void validate() const;
  bool operator==(const TerrainModel&) const = default;
};

/// Calibrated constants for the four reference materials. These are simulation
/// calibration values, not measured material properties.
TerrainModel terrain_preset(Material material);

struct ScoopGeometry {
  double width = 0.10;        // m, cutting edge
  double length = 0.12;       // m, mouth depth (for plotting)
  int edge_samples = 41;      // samples across the edge
  double lookahead = 0.0075;  // m ahead of the edge where undisturbed material is read
};

/// Terrain box footprint. Outside it there is no material.
struct TerrainBox {
  double x_min = 0.0, y_min = -0.3;
  double x_size = 0.9, y_size = 0.6;
  double depth = 0.2;
  double cell_size = 0.005;
};

class Heightmap {
 public:
  Heightmap() = default;
  Heightmap(const TerrainBox& box, double surface_height);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double cell_size() const { return cell_; }
  double cell_area() const { return cell_ * cell_; }
  const TerrainBox& box() const { return box_; }
  const std::vector<double>& heights() const { return heights_; }

  /// Cell index containing (x, y), or nullopt outside the box.
  std::optional<std::size_t> cell_at(double x, double y) const;
  /// Surface height at (x, y); -infinity outside the box.
  double height_at(double x, double y) const;
  double& at(std::size_t index) { return heights_[index]; }
  double at(std::size_t index) const { return heights_[index]; }
  /// Cell centre of a flat index.
  Vec3 cell_center(std::size_t index) const;

  bool operator==(const Heightmap&) const = default;

 private:
  TerrainBox box_;
  double cell_ = 0.005;
  int nx_ = 0, ny_ = 0;
  std::vector<double> heights_;
};

struct ObstacleModel {
  enum class Kind { RigidSlope, BuriedRock };
  Kind kind = Kind::RigidSlope;
  // RigidSlope: solid where normal . x < offset and z < top_height.
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  double top_height = 0.0;
  // BuriedRock: solid sphere.
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double contact_stiffness = 1e5;  // N/m

  /// Ramp rising along `heading` at `incline` rad from the horizontal, whose
  /// face passes through `foot`, capped at `top_height`.
  static ObstacleModel slope(const Vec3& foot, double heading, double incline,
                             double top_height, double contact_stiffness);
  static ObstacleModel rock(const Vec3& center, double radius, double contact_stiffness);

  /// Penetration depth and outward normal at a point; depth <= 0 outside.
  double penetration(const Vec3& point, Vec3* outward_normal) const;

  void validate(const TerrainModel& terrain) const;
  bool operator==(const ObstacleModel&) const = default;
};

std::string_view to_string(ObstacleModel::Kind kind);

struct TerrainState {
  Heightmap heightmap;
  bool jam_active = false;
  bool jam_armed = false;
  Pose jam_anchor;
  Vec3 jam_direction = Vec3::UnitX();
  double transverse_travel_since_jam = 0.0;  // rad
  double captured_volume = 0.0;              // cm^3
  double removed_volume = 0.0;               // cm^3, before capture efficiency
  double travel_in_material = 0.0;           // m
  std::vector<double> jam_sites;             // travel distances where a jam arms
  std::size_t next_jam_site = 0;
  int jam_count = 0;
  std::optional<Pose> last_pose;
};

/// Fresh terrain: flat heightmap, jam sites drawn from model.rng_seed.
TerrainState make_terrain_state(const TerrainModel& model, const TerrainBox& box = {});

/// Effective depth of the cutting edge below undisturbed material (m).
double effective_depth(const TerrainState& state, const Pose& scoop, const TerrainModel& model,
                       const ScoopGeometry& scoop_geometry = {});

struct WrenchComponents {
  Wrench elastic, drag, rotational, jam, obstacle;
  double depth = 0.0;

  Wrench total() const { return elastic + drag + rotational + jam + obstacle; }
};

WrenchComponents terrain_wrench_components(const TerrainState& state, const Pose& scoop,
                                           const Vec6& scoop_velocity, const TerrainModel& model,
                                           std::span<const ObstacleModel> obstacles,
                                           const ScoopGeometry& scoop_geometry = {});

/// Reaction wrench on the scoop from the terrain, world frame, about the tip.
Wrench terrain_wrench(const TerrainState& state, const Pose& scoop, const Vec6& scoop_velocity,
                      const TerrainModel& model, std::span<const ObstacleModel> obstacles,
                      const ScoopGeometry& scoop_geometry = {});

/// Arms, engages and releases jams for the scoop's new pose. `resistance` is
/// the terrain force resisting motion along the travel direction (N).
void jam_update(TerrainState& state, const Pose& scoop, const Vec6& scoop_velocity,
                double resistance, const TerrainModel& model,
                const ScoopGeometry& scoop_geometry = {});

/// Lowers cells under the cutting edge to the edge height and accrues the
/// removed volume (halved capture while |roll| exceeds the spill threshold).
void excavate_update(TerrainState& state, const Pose& scoop, double scoop_roll,
                     const TerrainModel& model, const ScoopGeometry& scoop_geometry = {});

/// Terrain resistance along the travel direction used for jam onset.
double travel_resistance(const WrenchComponents& wrench, const Vec6& scoop_velocity);

}  // namespace raic
