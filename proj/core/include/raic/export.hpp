#pragma once

// Plot-ready exports: per-step CSV logs, strobe poses, plans, heightmaps, and
// JSON / CSV metric tables. Floating-point values are written with 9
// significant digits so repeated runs diff cleanly.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "raic/config.hpp"
#include "raic/harness.hpp"

namespace raic {

/// Poses in CSV logs: yaw/pitch/roll + position, or a row-major rotation
/// matrix + position.
enum class PoseFormat { Euler, Matrix };

/// "%.9g".
std::string format_number(double value);

/// Column names of a step log; the Euler layout is
/// t, px, py, pz, yaw, pitch, roll, att_*, plan_*, fx..tz, D1..D6, F1..F6, phase, pstop.
std::vector<std::string> step_csv_columns(PoseFormat format = PoseFormat::Euler);

void write_step_csv(std::ostream& out, const std::vector<StepRecord>& log,
                    PoseFormat format = PoseFormat::Euler);

/// `count` equally spaced indices over [0, n): i * (n - 1) / (count - 1).
std::vector<std::size_t> strobe_indices(std::size_t n, std::size_t count);

/// End-effector poses at the strobe indices, with the step index.
void write_strobe_csv(std::ostream& out, const std::vector<StepRecord>& log, std::size_t count,
                      PoseFormat format = PoseFormat::Euler);

void write_plan_csv(std::ostream& out, const TrajectoryPlan& plan,
                    PoseFormat format = PoseFormat::Euler);

/// Dense grid: one row per y cell, one column per x cell, with a header
/// row of cell-centre x and a leading column of cell-centre y.
void write_heightmap_csv(std::ostream& out, const Heightmap& heightmap);

std::string scenario_summary_json(const ScenarioConfig& config, const ScenarioResult& result);
std::string sweep_json(const std::vector<SweepTable>& tables);
std::string ablation_json(const AblationTable& table);
std::string obstacle_demo_json(ObstacleKind kind, ControllerKind controller,
                               const ObstacleDemoResult& result);

/// One row per (parameter, level): parameter, level, value, reps, volume_mean, ...
void write_sweep_csv(std::ostream& out, const std::vector<SweepTable>& tables);
/// One row per ablation cell: method, terrain, reps, volume_mean, ...
void write_ablation_csv(std::ostream& out, const AblationTable& table);

/// Writes `contents` to `path`, refusing to replace an existing file unless
/// `overwrite`. Errors carry the path.
void write_file(const std::filesystem::path& path, const std::string& contents, bool overwrite);

}  // namespace raic
