#include "raic/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace raic {
namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

double sample_stdev(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

bool pstop_check(const Wrench& wrench, const PStopLimits& limits) {
  return wrench.force.norm() >= limits.force || wrench.torque.norm() >= limits.torque;
}

std::vector<Vec3> default_dig_sites() { return {Vec3(0.2, -0.12, 0.0), Vec3(0.2, 0.12, 0.0)}; }

void ScenarioConfig::validate() const {
  require(repetitions >= 1, "repetitions must be >= 1");
  require(!dig_sites.empty(), "at least one dig site is required");
  require(limits.force > 0.0 && limits.torque > 0.0, "P-stop limits must be > 0");
  pds.validate();
  primitives.validate();
  impedance.validate();
  raic.validate();
  terrain.validate();
  for (const ObstacleModel& o : obstacles) o.validate(terrain);
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return name == o.name && pds == o.pds && primitives == o.primitives &&
         controller == o.controller && impedance == o.impedance && raic == o.raic &&
         limits == o.limits && terrain == o.terrain && seed == o.seed &&
         obstacles == o.obstacles && repetitions == o.repetitions && dig_sites == o.dig_sites &&
         box.x_min == o.box.x_min && box.y_min == o.box.y_min && box.x_size == o.box.x_size &&
         box.y_size == o.box.y_size && box.depth == o.box.depth &&
         box.cell_size == o.box.cell_size && scoop.width == o.scoop.width &&
         scoop.length == o.scoop.length && scoop.edge_samples == o.scoop.edge_samples &&
         scoop.lookahead == o.scoop.lookahead;
}

std::vector<double> ScenarioResult::volumes() const {
  std::vector<double> out;
  out.reserve(repetitions.size());
  for (const auto& r : repetitions) out.push_back(r.volume);
  return out;
}

RepetitionResult run_repetition(const ScenarioConfig& config, int repetition, bool keep_log) {
  RepetitionResult out;
  out.index = repetition;
  out.seed = config.seed + static_cast<std::uint64_t>(repetition);

  TerrainModel terrain = config.terrain;
  terrain.rng_seed = out.seed;

  PdsParams pds = config.pds;
  const Vec3& site = config.dig_sites[static_cast<std::size_t>(repetition) % config.dig_sites.size()];
  pds.start = Vec3(site.x(), site.y(), terrain.surface_height);
  out.dig_site = pds.start;

  const TrajectoryPlan plan = generate_plan(pds, config.primitives);
  TerrainState ground = make_terrain_state(terrain, config.box);
  Controller controller(config.controller, config.impedance, config.raic, pds.sample_dt,
                        plan[0].pose);

  const std::size_t n = plan.size();
  out.total_steps = n;
  if (keep_log) out.log.reserve(n);

  std::size_t executed = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const ControllerState before = controller.state();
    const WrenchComponents parts =
        terrain_wrench_components(ground, before.end_effector, before.velocity, terrain,
                                  config.obstacles, config.scoop);
    const Wrench wrench = parts.total();
    out.max_force = std::max(out.max_force, wrench.force.norm());
    out.max_torque = std::max(out.max_torque, wrench.torque.norm());

    StepRecord rec;
    if (keep_log) {
      rec.time = plan[k].time;
      rec.end_effector = before.end_effector;
      rec.attractor = before.attractor;
      rec.plan = plan[k].pose;
      rec.wrench = wrench;
      rec.phase = plan[k].phase;
      rec.jammed = ground.jam_active;
      rec.obstacle_contact = parts.obstacle.force.squaredNorm() > 0.0;
    }

    if (pstop_check(wrench, config.limits)) {
      out.pstop = true;
      if (keep_log) {
        rec.pstop = true;
        out.log.push_back(rec);
      }
      break;
    }

    const Pose& next = plan[std::min(k + 1, n - 1)].pose;
    const ControlDiagnostics diag = controller.step(plan[k].pose, next, wrench);
    const ControllerState& after = controller.state();
    jam_update(ground, after.end_effector, after.velocity, travel_resistance(parts, before.velocity),
               terrain, config.scoop);
    excavate_update(ground, after.end_effector, euler_zyx(after.end_effector.rotation).roll,
                    terrain, config.scoop);
    ++executed;

    if (keep_log) {
      rec.feedforward_gain = diag.feedforward_gain;
      rec.feedback_gain = diag.feedback_gain;
      out.log.push_back(rec);
    }
  }

  out.steps_executed = executed;
  out.completion = out.pstop ? 100.0 * static_cast<double>(executed) / static_cast<double>(n)
                             : 100.0;
  out.captured_volume = ground.captured_volume;
  out.volume = out.pstop ? 0.0 : ground.captured_volume;
  out.jam_count = ground.jam_count;
  if (keep_log) out.heightmap = std::move(ground.heightmap);
  return out;
}

ScenarioResult summarize(std::vector<RepetitionResult> repetitions) {
  ScenarioResult out;
  out.repetitions = std::move(repetitions);
  const auto n = static_cast<double>(out.repetitions.size());
  if (out.repetitions.empty()) return out;
  double volume = 0.0, completion = 0.0, stops = 0.0;
  for (const auto& r : out.repetitions) {
    volume += r.volume;
    completion += r.completion;
    stops += r.pstop ? 1.0 : 0.0;
  }
  out.volume_mean = volume / n;
  out.volume_stdev = sample_stdev(out.volumes(), out.volume_mean);
  out.pstop_rate = 100.0 * stops / n;
  out.completion_pct = completion / n;
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config, bool keep_logs) {
  config.validate();
  std::vector<RepetitionResult> reps;
  reps.reserve(static_cast<std::size_t>(config.repetitions));
  for (int r = 0; r < config.repetitions; ++r) reps.push_back(run_repetition(config, r, keep_logs));
  return summarize(std::move(reps));
}

// ---------------------------------------------------------------------------
// Sweeps

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::SwivelAmp: return "SwivelAmp";
    case SweepParameter::SwivelFreq: return "SwivelFreq";
    case SweepParameter::TwistAmp: return "TwistAmp";
    case SweepParameter::TwistFreq: return "TwistFreq";
    case SweepParameter::DiveS: return "DiveS";
  }
  return "unknown";
}

std::string_view to_string(SweepLevel l) {
  switch (l) {
    case SweepLevel::Zero: return "Zero";
    case SweepLevel::Low: return "Low";
    case SweepLevel::Medium: return "Medium";
    case SweepLevel::High: return "High";
  }
  return "unknown";
}

std::optional<SweepParameter> sweep_parameter_from_string(std::string_view name) {
  for (SweepParameter p : kAllSweepParameters) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

double sweep_level_value(SweepParameter parameter, SweepLevel level) {
  const auto i = static_cast<std::size_t>(level);
  static constexpr std::array<double, 4> swivel_amp = {0.0, kPi / 16, kPi / 8, 3 * kPi / 16};
  static constexpr std::array<double, 4> twist_amp = {0.0, kPi / 12, kPi / 6, kPi / 4};
  static constexpr std::array<double, 4> frequency = {0.0, kPi, 2 * kPi, 4 * kPi};
  static constexpr std::array<double, 4> dive = {0.0, 0.33, 0.66, 1.0};
  switch (parameter) {
    case SweepParameter::SwivelAmp: return swivel_amp[i];
    case SweepParameter::TwistAmp: return twist_amp[i];
    case SweepParameter::SwivelFreq:
    case SweepParameter::TwistFreq: return frequency[i];
    case SweepParameter::DiveS: return dive[i];
  }
  return 0.0;
}

PrimitiveParams sweep_primitives(SweepParameter parameter, SweepLevel level) {
  PrimitiveParams p;
  if (level == SweepLevel::Zero) return p;
  const double v = sweep_level_value(parameter, level);
  switch (parameter) {
    case SweepParameter::SwivelAmp:
      p.swivel_amplitude = v;
      p.swivel_frequency = sweep_level_value(SweepParameter::SwivelFreq, SweepLevel::Low);
      break;
    case SweepParameter::SwivelFreq:
      p.swivel_amplitude = sweep_level_value(SweepParameter::SwivelAmp, SweepLevel::Low);
      p.swivel_frequency = v;
      break;
    case SweepParameter::TwistAmp:
      p.twist_amplitude = v;
      p.twist_frequency = sweep_level_value(SweepParameter::TwistFreq, SweepLevel::Low);
      break;
    case SweepParameter::TwistFreq:
      p.twist_amplitude = sweep_level_value(SweepParameter::TwistAmp, SweepLevel::Low);
      p.twist_frequency = v;
      break;
    case SweepParameter::DiveS: p.dive = v; break;
  }
  return p;
}

SweepTable run_sweep(SweepParameter parameter, const ScenarioConfig& base) {
  SweepTable table;
  table.parameter = parameter;
  table.terrain = base.terrain.name;
  for (std::size_t i = 0; i < kAllSweepLevels.size(); ++i) {
    const SweepLevel level = kAllSweepLevels[i];
    ScenarioConfig cfg = base;
    cfg.primitives = sweep_primitives(parameter, level);
    table.cells[i] = SweepCell{level, sweep_level_value(parameter, level), run_scenario(cfg)};
  }
  return table;
}

// ---------------------------------------------------------------------------
// Ablation

PrimitiveParams tuned_primitives() {
  PrimitiveParams p;
  p.swivel_amplitude = kPi / 8;
  p.swivel_frequency = kPi;
  p.twist_amplitude = kPi / 12;
  p.twist_frequency = kPi;
  p.dive = 0.5;
  return p;
}

AblationSpec AblationSpec::defaults() {
  AblationSpec spec;
  for (Material m : {Material::Pebbles, Material::Gravel, Material::Slate, Material::Mulch}) {
    spec.terrains.push_back(terrain_preset(m));
  }
  spec.repetitions_by_terrain["Slate"] = 30;
  spec.primitives = tuned_primitives();
  return spec;
}

int AblationSpec::repetitions_for(const std::string& terrain) const {
  const auto it = repetitions_by_terrain.find(terrain);
  return it == repetitions_by_terrain.end() ? repetitions : it->second;
}

void AblationSpec::validate() const {
  require(!terrains.empty(), "ablation needs at least one terrain");
  require(repetitions >= 1, "repetitions must be >= 1");
  for (const auto& [name, reps] : repetitions_by_terrain) {
    require(reps >= 1, "repetitions for " + name + " must be >= 1");
  }
  for (const TerrainModel& t : terrains) t.validate();
  pds.validate();
  primitives.validate();
  impedance.validate();
  raic.validate();
}

bool AblationSpec::operator==(const AblationSpec& o) const {
  return terrains == o.terrains && seed == o.seed && repetitions == o.repetitions &&
         repetitions_by_terrain == o.repetitions_by_terrain && pds == o.pds &&
         primitives == o.primitives && impedance == o.impedance && raic == o.raic &&
         limits == o.limits;
}

std::string AblationRow::method() const {
  return std::string(to_string(controller)) + (primitives ? " + Primitives" : " + PDS");
}

const AblationRow* AblationTable::find(ControllerKind controller, bool primitives,
                                       std::string_view terrain) const {
  for (const AblationRow& row : rows) {
    if (row.controller == controller && row.primitives == primitives && row.terrain == terrain) {
      return &row;
    }
  }
  return nullptr;
}

AblationTable run_ablation(const AblationSpec& spec) {
  spec.validate();
  AblationTable table;
  for (ControllerKind controller : {ControllerKind::Impedance, ControllerKind::Raic}) {
    for (bool primitives : {false, true}) {
      for (const TerrainModel& terrain : spec.terrains) {
        ScenarioConfig cfg;
        cfg.name = terrain.name;
        cfg.pds = spec.pds;
        cfg.primitives = primitives ? spec.primitives : PrimitiveParams{};
        cfg.controller = controller;
        cfg.impedance = spec.impedance;
        cfg.raic = spec.raic;
        cfg.limits = spec.limits;
        cfg.terrain = terrain;
        cfg.seed = spec.seed;
        cfg.repetitions = spec.repetitions_for(terrain.name);
        AblationRow row;
        row.controller = controller;
        row.primitives = primitives;
        row.terrain = terrain.name;
        row.repetitions = cfg.repetitions;
        row.result = run_scenario(cfg);
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Hidden obstacles

std::string_view to_string(ObstacleKind kind) {
  return kind == ObstacleKind::Slope ? "slope" : "rock";
}

ScenarioConfig obstacle_demo_config(ObstacleKind kind, ControllerKind controller) {
  ScenarioConfig cfg;
  cfg.controller = controller;
  cfg.dig_sites = {Vec3(0.2, 0.0, 0.0)};
  cfg.repetitions = 1;
  cfg.seed = 7;
  if (kind == ObstacleKind::Slope) {
    cfg.name = "slope-demo";
    cfg.terrain = terrain_preset(Material::Gravel);
    cfg.pds.depth = 0.06;
    cfg.pds.drag_length = 0.35;
    cfg.primitives.swivel_amplitude = sweep_level_value(SweepParameter::SwivelAmp, SweepLevel::High);
    cfg.primitives.swivel_frequency = sweep_level_value(SweepParameter::SwivelFreq, SweepLevel::Low);
    cfg.primitives.dive = 0.5;
    cfg.obstacles.push_back(ObstacleModel::slope(Vec3(0.45, 0.0, -0.07), 0.0, 65.0 * kPi / 180.0,
                                                 -0.01, 1e5));
  } else {
    cfg.name = "rock-demo";
    cfg.terrain = terrain_preset(Material::Pebbles);
    cfg.primitives = tuned_primitives();
    cfg.obstacles.push_back(ObstacleModel::rock(Vec3(0.45, 0.0, -0.06), 0.04, 1e5));
  }
  return cfg;
}

ObstacleDemoResult run_obstacle_demo(ObstacleKind kind, ControllerKind controller) {
  const ScenarioConfig cfg = obstacle_demo_config(kind, controller);
  cfg.validate();
  ObstacleDemoResult out;
  out.trace = run_repetition(cfg, 0, true);
  for (const StepRecord& rec : out.trace.log) {
    if (!rec.obstacle_contact) continue;
    ++out.contact_steps;
    out.min_feedforward_gain_in_contact =
        std::min(out.min_feedforward_gain_in_contact, rec.feedforward_gain.minCoeff());
  }
  RepetitionResult summary = out.trace;
  summary.log.clear();
  out.result = summarize({summary});
  return out;
}

}  // namespace raic
