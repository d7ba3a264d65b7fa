// raic: run excavation scenarios, primitive sweeps, controller ablations and
// obstacle demos from YAML configs, and export logs and metric tables.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>

#include "raic/config.hpp"
#include "raic/export.hpp"
#include "raic/harness.hpp"

namespace fs = std::filesystem;
using namespace raic;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::string preset_dir;
  std::string pose_format = "euler";
  std::size_t strobe = 10;
  bool force = false;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("raic");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("RAIC_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

ConfigOptions config_options(const Common& c) {
  ConfigOptions o;
  if (!c.preset_dir.empty()) {
    o.preset_dir = c.preset_dir;
  } else if (const char* env = std::getenv("RAIC_PRESET_DIR")) {
    o.preset_dir = env;
  } else if (fs::is_directory(RAIC_DEFAULT_PRESET_DIR)) {
    o.preset_dir = RAIC_DEFAULT_PRESET_DIR;
  }
  return o;
}

PoseFormat pose_format(const Common& c) {
  return c.pose_format == "matrix" ? PoseFormat::Matrix : PoseFormat::Euler;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir + ": cannot create output directory: " + ec.message());
  return dir;
}

// Fails before any work is done if an output would be overwritten.
void guard_outputs(const fs::path& dir, const std::vector<std::string>& names, bool force) {
  if (force) return;
  for (const std::string& name : names) {
    if (fs::exists(dir / name)) {
      throw IoError((dir / name).string() + ": file exists (use --force to overwrite)");
    }
  }
}

template <typename T>
T load_as(const Common& c, const char* command) {
  ExperimentConfig cfg = load_config(c.config, config_options(c));
  if (auto* v = std::get_if<T>(&cfg)) return *v;
  throw ConfigError(0, "kind", c.config + ": config kind does not match the '" +
                                   std::string(command) + "' command");
}

void emit(const fs::path& path, const std::string& contents, bool force) {
  try {
    write_file(path, contents, force);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
  spdlog::debug("wrote {}", path.string());
}

template <typename F>
std::string to_text(F&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

void log_metrics(const std::string& label, const ScenarioResult& r) {
  spdlog::info("{}: volume {:.1f} +/- {:.1f} cm3, P-stop {:.1f}%, completion {:.1f}%", label,
               r.volume_mean, r.volume_stdev, r.pstop_rate, r.completion_pct);
}

void write_run_artifacts(const fs::path& dir, const RepetitionResult& rep,
                         const std::string& suffix, const Common& c) {
  const PoseFormat fmt = pose_format(c);
  emit(dir / ("steps" + suffix + ".csv"), to_text([&](auto& o) { write_step_csv(o, rep.log, fmt); }),
       c.force);
}

int cmd_run(const Common& c) {
  ScenarioConfig cfg = load_as<ScenarioConfig>(c, "run");
  if (c.seed) cfg.seed = *c.seed;
  if (c.reps) cfg.repetitions = *c.reps;
  const fs::path dir = prepare_dir(c.out_dir);
  std::vector<std::string> names{"config.yaml", "summary.json", "strobe.csv", "heightmap.csv",
                                 "plan.csv"};
  for (int r = 0; r < cfg.repetitions; ++r) names.push_back("steps_rep" + std::to_string(r) + ".csv");
  guard_outputs(dir, names, c.force);
  spdlog::info("running '{}' on {} with {} ({} repetitions)", cfg.name, cfg.terrain.name,
               to_string(cfg.controller), cfg.repetitions);

  const ScenarioResult result = run_scenario(cfg, true);
  log_metrics(cfg.name, result);

  emit(dir / "config.yaml", render_config(cfg), c.force);
  emit(dir / "summary.json", scenario_summary_json(cfg, result), c.force);
  for (const RepetitionResult& rep : result.repetitions) {
    write_run_artifacts(dir, rep, "_rep" + std::to_string(rep.index), c);
  }
  const RepetitionResult& first = result.repetitions.front();
  const PoseFormat fmt = pose_format(c);
  emit(dir / "strobe.csv",
       to_text([&](auto& o) { write_strobe_csv(o, first.log, c.strobe, fmt); }), c.force);
  emit(dir / "heightmap.csv", to_text([&](auto& o) { write_heightmap_csv(o, first.heightmap); }),
       c.force);
  PdsParams pds = cfg.pds;
  pds.start = first.dig_site;
  const TrajectoryPlan plan = generate_plan(pds, cfg.primitives);
  emit(dir / "plan.csv", to_text([&](auto& o) { write_plan_csv(o, plan, fmt); }), c.force);
  return 0;
}

int cmd_sweep(const Common& c) {
  SweepSpec spec = load_as<SweepSpec>(c, "sweep");
  if (c.seed) spec.base.seed = *c.seed;
  if (c.reps) spec.base.repetitions = *c.reps;
  spec.base.validate();
  const fs::path dir = prepare_dir(c.out_dir);
  guard_outputs(dir, {"config.yaml", "sweep.json", "sweep.csv"}, c.force);

  std::vector<SweepTable> tables;
  for (SweepParameter p : spec.parameters) {
    spdlog::info("sweeping {} on {} ({} repetitions per level)", to_string(p),
                 spec.base.terrain.name, spec.base.repetitions);
    tables.push_back(run_sweep(p, spec.base));
    for (const SweepCell& cell : tables.back().cells) {
      log_metrics(std::string(to_string(p)) + " " + std::string(to_string(cell.level)), cell.result);
    }
  }
  emit(dir / "config.yaml", render_config(spec), c.force);
  emit(dir / "sweep.json", sweep_json(tables), c.force);
  emit(dir / "sweep.csv", to_text([&](auto& o) { write_sweep_csv(o, tables); }), c.force);
  return 0;
}

int cmd_ablate(const Common& c) {
  AblationSpec spec = load_as<AblationSpec>(c, "ablate");
  if (c.seed) spec.seed = *c.seed;
  if (c.reps) {
    spec.repetitions = *c.reps;
    spec.repetitions_by_terrain.clear();
  }
  const fs::path dir = prepare_dir(c.out_dir);
  guard_outputs(dir, {"config.yaml", "ablation.json", "ablation.csv"}, c.force);
  spdlog::info("ablation over {} terrains", spec.terrains.size());
  const AblationTable table = run_ablation(spec);
  for (const AblationRow& row : table.rows) log_metrics(row.method() + " / " + row.terrain, row.result);
  emit(dir / "config.yaml", render_config(spec), c.force);
  emit(dir / "ablation.json", ablation_json(table), c.force);
  emit(dir / "ablation.csv", to_text([&](auto& o) { write_ablation_csv(o, table); }), c.force);
  return 0;
}

int cmd_obstacle_demo(const Common& c, const std::string& kind_name,
                      const std::string& controller_name) {
  const ObstacleKind kind = kind_name == "rock" ? ObstacleKind::Rock : ObstacleKind::Slope;
  const ControllerKind controller =
      controller_name == "impedance" ? ControllerKind::Impedance : ControllerKind::Raic;
  const fs::path dir = prepare_dir(c.out_dir);
  guard_outputs(dir, {"config.yaml", "summary.json", "steps.csv", "strobe.csv", "heightmap.csv"},
                c.force);
  const ObstacleDemoResult demo = run_obstacle_demo(kind, controller);
  log_metrics(std::string(to_string(kind)) + " / " + std::string(to_string(controller)),
              demo.result);
  spdlog::info("obstacle contact for {} steps, min feedforward gain {:.3f}", demo.contact_steps,
               demo.min_feedforward_gain_in_contact);

  const PoseFormat fmt = pose_format(c);
  emit(dir / "config.yaml", render_config(obstacle_demo_config(kind, controller)), c.force);
  emit(dir / "summary.json", obstacle_demo_json(kind, controller, demo), c.force);
  emit(dir / "steps.csv", to_text([&](auto& o) { write_step_csv(o, demo.trace.log, fmt); }),
       c.force);
  emit(dir / "strobe.csv",
       to_text([&](auto& o) { write_strobe_csv(o, demo.trace.log, c.strobe, fmt); }), c.force);
  emit(dir / "heightmap.csv",
       to_text([&](auto& o) { write_heightmap_csv(o, demo.trace.heightmap); }), c.force);
  return 0;
}

int cmd_export(const Common& c, bool presets) {
  const fs::path dir = prepare_dir(c.out_dir);
  if (presets) {
    for (Material m : {Material::Pebbles, Material::Gravel, Material::Slate, Material::Mulch}) {
      emit(dir / (std::string(to_string(m)) + ".yaml"), render_terrain(terrain_preset(m)), c.force);
    }
    return 0;
  }
  if (c.config.empty()) throw ConfigError(0, "", "export needs -c <config> or --presets");
  const ExperimentConfig cfg = load_config(c.config, config_options(c));
  emit(dir / "config.yaml", render_config(cfg), c.force);

  const ScenarioConfig* scenario = std::get_if<ScenarioConfig>(&cfg);
  if (const auto* sweep = std::get_if<SweepSpec>(&cfg)) scenario = &sweep->base;
  if (!scenario) return 0;
  const PoseFormat fmt = pose_format(c);
  for (std::size_t i = 0; i < scenario->dig_sites.size(); ++i) {
    PdsParams pds = scenario->pds;
    pds.start = Vec3(scenario->dig_sites[i].x(), scenario->dig_sites[i].y(),
                     scenario->terrain.surface_height);
    const TrajectoryPlan plan = generate_plan(pds, scenario->primitives);
    emit(dir / ("plan_site" + std::to_string(i) + ".csv"),
         to_text([&](auto& o) { write_plan_csv(o, plan, fmt); }), c.force);
  }
  return 0;
}

void add_outputs(CLI::App* cmd, Common& c) {
  cmd->add_option("-o,--output", c.out_dir, "Output directory (created if missing)")->required();
  cmd->add_flag("--force", c.force, "Overwrite existing output files");
  cmd->add_option("--pose-format", c.pose_format, "Pose columns in CSV logs")
      ->check(CLI::IsMember({"euler", "matrix"}));
  cmd->add_option("--strobe", c.strobe, "Number of strobe poses")->check(CLI::PositiveNumber);
}

void add_config(CLI::App* cmd, Common& c, bool required) {
  auto* opt = cmd->add_option("-c,--config", c.config, "YAML config file")->check(CLI::ExistingFile);
  if (required) opt->required();
  cmd->add_option("--preset-dir", c.preset_dir, "Directory of terrain preset files");
}

void add_overrides(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Override the base seed");
  cmd->add_option("--reps", c.reps, "Override the repetition count")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Excavation primitives and reactive attractor impedance control on simulated terrain"};
  app.require_subcommand(1);
  Common c;

  auto* run = app.add_subcommand("run", "Run a scenario config");
  add_config(run, c, true);
  add_outputs(run, c);
  add_overrides(run, c);

  auto* sweep = app.add_subcommand("sweep", "Sweep primitive parameters over Zero/Low/Medium/High");
  add_config(sweep, c, true);
  add_outputs(sweep, c);
  add_overrides(sweep, c);

  auto* ablate = app.add_subcommand("ablate", "Controller x trajectory ablation over terrains");
  add_config(ablate, c, true);
  add_outputs(ablate, c);
  add_overrides(ablate, c);

  std::string kind = "slope", controller = "raic";
  auto* demo = app.add_subcommand("obstacle-demo", "Hidden slope or buried rock demo");
  demo->add_option("--kind", kind, "Obstacle")->check(CLI::IsMember({"slope", "rock"}));
  demo->add_option("--controller", controller, "Controller")
      ->check(CLI::IsMember({"raic", "impedance"}));
  add_outputs(demo, c);

  bool presets = false;
  auto* exp = app.add_subcommand("export", "Write the resolved config and planned trajectories");
  add_config(exp, c, false);
  exp->add_flag("--presets", presets, "Write the built-in terrain presets instead");
  add_outputs(exp, c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(c);
    if (sweep->parsed()) return cmd_sweep(c);
    if (ablate->parsed()) return cmd_ablate(c);
    if (demo->parsed()) return cmd_obstacle_demo(c, kind, controller);
    if (exp->parsed()) return cmd_export(c, presets);
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kExitIoError;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    spdlog::error("invalid configuration: {}", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitIoError;
  }
  return 0;
}
