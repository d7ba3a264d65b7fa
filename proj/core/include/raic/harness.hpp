#pragma once

// Closed-loop scenario runner: plan generation, controller, terrain plant,
// protective-stop detection and the volume / P-stop / completion metrics, plus
// the primitive parameter sweeps, the controller x trajectory ablation and the
// hidden-obstacle demos built on it.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "raic/controllers.hpp"
#include "raic/geometry.hpp"
#include "raic/terrain.hpp"
#include "raic/trajectory.hpp"

namespace raic {

struct PStopLimits {
  double force = 60.0;   // N
  double torque = 10.0;  // N m
  bool operator==(const PStopLimits&) const = default;
};

/// True iff |force| >= limits.force or |torque| >= limits.torque.
bool pstop_check(const Wrench& wrench, const PStopLimits& limits);

/// Two penetration points per terrain box, alternated across repetitions.
std::vector<Vec3> default_dig_sites();

struct ScenarioConfig {
  std::string name = "scenario";
  PdsParams pds;
  PrimitiveParams primitives;
  ControllerKind controller = ControllerKind::Raic;
  ImpedanceGains impedance = ImpedanceGains::defaults();
  RaicGains raic = RaicGains::defaults();
  PStopLimits limits;
  TerrainModel terrain = terrain_preset(Material::Pebbles);
  std::uint64_t seed = 1;
  std::vector<ObstacleModel> obstacles;
  int repetitions = 1;
  std::vector<Vec3> dig_sites = default_dig_sites();
  TerrainBox box;
  ScoopGeometry scoop;

  void validate() const;
  bool operator==(const ScenarioConfig& o) const;
};

struct StepRecord {
  double time = 0.0;
  Pose end_effector;
  Pose attractor;
  Pose plan;
  Wrench wrench;
  Vec6 feedforward_gain = Vec6::Ones();
  Vec6 feedback_gain = Vec6::Ones();
  Phase phase = Phase::Penetrate;
  bool pstop = false;
  bool jammed = false;
  bool obstacle_contact = false;
};

struct RepetitionResult {
  int index = 0;
  std::uint64_t seed = 0;
  Vec3 dig_site = Vec3::Zero();
  double volume = 0.0;           // cm^3, 0 when P-stopped
  double captured_volume = 0.0;  // cm^3 in the scoop when the run ended
  bool pstop = false;
  double completion = 0.0;       // percent of plan steps executed
  std::size_t steps_executed = 0;
  std::size_t total_steps = 0;
  double max_force = 0.0;
  double max_torque = 0.0;
  int jam_count = 0;
  std::vector<StepRecord> log;  // filled when requested
  Heightmap heightmap;          // terrain after the run, filled with the log
};

struct ScenarioResult {
  std::vector<RepetitionResult> repetitions;
  double volume_mean = 0.0;
  double volume_stdev = 0.0;  // sample standard deviation
  double pstop_rate = 0.0;    // percent
  double completion_pct = 0.0;

  std::vector<double> volumes() const;
};

/// One repetition r: seed = config.seed + r, dig site r mod #sites, fresh
/// terrain.
RepetitionResult run_repetition(const ScenarioConfig& config, int repetition, bool keep_log);

ScenarioResult run_scenario(const ScenarioConfig& config, bool keep_logs = false);

/// Mean / sample-stdev / rates over repetition results.
ScenarioResult summarize(std::vector<RepetitionResult> repetitions);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepParameter { SwivelAmp, SwivelFreq, TwistAmp, TwistFreq, DiveS };
enum class SweepLevel { Zero, Low, Medium, High };

inline constexpr std::array<SweepParameter, 5> kAllSweepParameters = {
    SweepParameter::SwivelAmp, SweepParameter::SwivelFreq, SweepParameter::TwistAmp,
    SweepParameter::TwistFreq, SweepParameter::DiveS};
inline constexpr std::array<SweepLevel, 4> kAllSweepLevels = {
    SweepLevel::Zero, SweepLevel::Low, SweepLevel::Medium, SweepLevel::High};

std::string_view to_string(SweepParameter p);
std::string_view to_string(SweepLevel l);
std::optional<SweepParameter> sweep_parameter_from_string(std::string_view name);

/// Value of the swept parameter at a level (rad, rad/s or unitless).
double sweep_level_value(SweepParameter parameter, SweepLevel level);

/// Primitive set for one grid cell: the swept parameter at `level`, its
/// partner amplitude/frequency at Low, everything else zero. The Zero level
/// is plain PDS for every parameter.
PrimitiveParams sweep_primitives(SweepParameter parameter, SweepLevel level);

struct SweepCell {
  SweepLevel level = SweepLevel::Zero;
  double value = 0.0;
  ScenarioResult result;
};

struct SweepTable {
  SweepParameter parameter = SweepParameter::SwivelAmp;
  std::string terrain;
  std::array<SweepCell, 4> cells;
};

SweepTable run_sweep(SweepParameter parameter, const ScenarioConfig& base);

// ---------------------------------------------------------------------------
// Ablation

struct AblationSpec {
  std::vector<TerrainModel> terrains;
  std::uint64_t seed = 1000;
  int repetitions = 12;
  std::map<std::string, int> repetitions_by_terrain;  // overrides, e.g. Slate -> 30
  PdsParams pds;
  PrimitiveParams primitives;  // used by the "Primitives" conditions
  ImpedanceGains impedance = ImpedanceGains::defaults();
  RaicGains raic = RaicGains::defaults();
  PStopLimits limits;

  /// All four presets, 12 repetitions (30 on Slate), tuned primitives.
  static AblationSpec defaults();
  int repetitions_for(const std::string& terrain) const;
  void validate() const;
  bool operator==(const AblationSpec& o) const;
};

/// Primitive setting used for the "Primitives" trajectory conditions.
PrimitiveParams tuned_primitives();

struct AblationRow {
  ControllerKind controller = ControllerKind::Impedance;
  bool primitives = false;
  std::string terrain;
  int repetitions = 0;
  ScenarioResult result;

  std::string method() const;  // e.g. "Impedance + PDS"
};

struct AblationTable {
  std::vector<AblationRow> rows;  // condition-major, terrain-minor

  const AblationRow* find(ControllerKind controller, bool primitives,
                          std::string_view terrain) const;
};

AblationTable run_ablation(const AblationSpec& spec);

// ---------------------------------------------------------------------------
// Hidden obstacles

enum class ObstacleKind { Slope, Rock };

std::string_view to_string(ObstacleKind kind);

ScenarioConfig obstacle_demo_config(ObstacleKind kind, ControllerKind controller);

struct ObstacleDemoResult {
  ScenarioResult result;
  RepetitionResult trace;  // repetition 0 with its step log
  double min_feedforward_gain_in_contact = 1.0;
  std::size_t contact_steps = 0;
};

ObstacleDemoResult run_obstacle_demo(ObstacleKind kind, ControllerKind controller);

}  // namespace raic
