#include "raic/export.hpp"

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace raic {
namespace {

using nlohmann::ordered_json;

// Value rounded to the 9 significant digits used in every export.
double rounded(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(format_number(v));
}

void pose_columns(std::vector<std::string>& cols, const std::string& prefix, PoseFormat format,
                  bool bare_position = false) {
  for (const char* c : {"px", "py", "pz"}) cols.push_back(prefix + (bare_position ? c + 1 : c));
  if (format == PoseFormat::Euler) {
    for (const char* c : {"yaw", "pitch", "roll"}) cols.push_back(prefix + c);
  } else {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) cols.push_back(prefix + "r" + std::to_string(r) + std::to_string(c));
    }
  }
}

void write_pose(std::ostream& out, const Pose& pose, PoseFormat format) {
  for (int i = 0; i < 3; ++i) out << ',' << format_number(pose.position[i]);
  if (format == PoseFormat::Euler) {
    const EulerAngles e = euler_zyx(pose.rotation);
    out << ',' << format_number(e.yaw) << ',' << format_number(e.pitch) << ','
        << format_number(e.roll);
  } else {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << ',' << format_number(pose.rotation(r, c));
    }
  }
}

void write_header(std::ostream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

ordered_json metrics_json(const ScenarioResult& r) {
  ordered_json j;
  j["repetitions"] = r.repetitions.size();
  j["volume_mean_cm3"] = rounded(r.volume_mean);
  j["volume_stdev_cm3"] = rounded(r.volume_stdev);
  j["pstop_rate_pct"] = rounded(r.pstop_rate);
  j["completion_pct"] = rounded(r.completion_pct);
  return j;
}

ordered_json repetitions_json(const ScenarioResult& r) {
  ordered_json reps = ordered_json::array();
  for (const RepetitionResult& rep : r.repetitions) {
    ordered_json j;
    j["index"] = rep.index;
    j["seed"] = rep.seed;
    j["dig_site"] = {rounded(rep.dig_site.x()), rounded(rep.dig_site.y()), rounded(rep.dig_site.z())};
    j["volume_cm3"] = rounded(rep.volume);
    j["pstop"] = rep.pstop;
    j["completion_pct"] = rounded(rep.completion);
    j["steps_executed"] = rep.steps_executed;
    j["total_steps"] = rep.total_steps;
    j["max_force_n"] = rounded(rep.max_force);
    j["max_torque_nm"] = rounded(rep.max_torque);
    j["jams"] = rep.jam_count;
    reps.push_back(std::move(j));
  }
  return reps;
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::vector<std::string> step_csv_columns(PoseFormat format) {
  std::vector<std::string> cols{"t"};
  pose_columns(cols, "", format);
  pose_columns(cols, "att_", format);
  pose_columns(cols, "plan_", format);
  for (const char* c : {"fx", "fy", "fz", "tx", "ty", "tz"}) cols.emplace_back(c);
  for (int i = 1; i <= 6; ++i) cols.push_back("D" + std::to_string(i));
  for (int i = 1; i <= 6; ++i) cols.push_back("F" + std::to_string(i));
  cols.emplace_back("phase");
  cols.emplace_back("pstop");
  return cols;
}

void write_step_csv(std::ostream& out, const std::vector<StepRecord>& log, PoseFormat format) {
  write_header(out, step_csv_columns(format));
  for (const StepRecord& r : log) {
    out << format_number(r.time);
    write_pose(out, r.end_effector, format);
    write_pose(out, r.attractor, format);
    write_pose(out, r.plan, format);
    const Vec6 w = r.wrench.as_vector();
    for (int i = 0; i < 6; ++i) out << ',' << format_number(w[i]);
    for (int i = 0; i < 6; ++i) out << ',' << format_number(r.feedforward_gain[i]);
    for (int i = 0; i < 6; ++i) out << ',' << format_number(r.feedback_gain[i]);
    out << ',' << to_string(r.phase) << ',' << (r.pstop ? 1 : 0) << '\n';
  }
}

std::vector<std::size_t> strobe_indices(std::size_t n, std::size_t count) {
  std::vector<std::size_t> out;
  if (n == 0 || count == 0) return out;
  if (count == 1) return {0};
  count = std::min(count, n);
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(i * (n - 1) / (count - 1));
  return out;
}

void write_strobe_csv(std::ostream& out, const std::vector<StepRecord>& log, std::size_t count,
                      PoseFormat format) {
  std::vector<std::string> cols{"step", "t"};
  pose_columns(cols, "", format);
  write_header(out, cols);
  for (std::size_t i : strobe_indices(log.size(), count)) {
    out << i << ',' << format_number(log[i].time);
    write_pose(out, log[i].end_effector, format);
    out << '\n';
  }
}

void write_plan_csv(std::ostream& out, const TrajectoryPlan& plan, PoseFormat format) {
  std::vector<std::string> cols{"t"};
  pose_columns(cols, "", format, true);
  cols.emplace_back("phase");
  write_header(out, cols);
  for (const PlanSample& s : plan.samples) {
    out << format_number(s.time);
    write_pose(out, s.pose, format);
    out << ',' << to_string(s.phase) << '\n';
  }
}

void write_heightmap_csv(std::ostream& out, const Heightmap& hm) {
  out << "y\\x";
  for (int i = 0; i < hm.nx(); ++i) out << ',' << format_number(hm.cell_center(i).x());
  out << '\n';
  for (int j = 0; j < hm.ny(); ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * hm.nx();
    out << format_number(hm.cell_center(row).y());
    for (int i = 0; i < hm.nx(); ++i) out << ',' << format_number(hm.at(row + i));
    out << '\n';
  }
}

std::string scenario_summary_json(const ScenarioConfig& config, const ScenarioResult& result) {
  ordered_json j;
  j["name"] = config.name;
  j["terrain"] = config.terrain.name;
  j["controller"] = std::string(to_string(config.controller));
  j["base_seed"] = config.seed;
  j["metrics"] = metrics_json(result);
  j["runs"] = repetitions_json(result);
  return j.dump(2) + "\n";
}

std::string sweep_json(const std::vector<SweepTable>& tables) {
  ordered_json out = ordered_json::array();
  for (const SweepTable& t : tables) {
    ordered_json table;
    table["parameter"] = std::string(to_string(t.parameter));
    table["terrain"] = t.terrain;
    ordered_json cells = ordered_json::array();
    for (const SweepCell& c : t.cells) {
      ordered_json cell;
      cell["level"] = std::string(to_string(c.level));
      cell["value"] = rounded(c.value);
      cell["metrics"] = metrics_json(c.result);
      ordered_json volumes = ordered_json::array();
      for (double v : c.result.volumes()) volumes.push_back(rounded(v));
      cell["volumes_cm3"] = std::move(volumes);
      cells.push_back(std::move(cell));
    }
    table["levels"] = std::move(cells);
    out.push_back(std::move(table));
  }
  return ordered_json{{"sweeps", out}}.dump(2) + "\n";
}

std::string ablation_json(const AblationTable& table) {
  ordered_json rows = ordered_json::array();
  for (const AblationRow& r : table.rows) {
    ordered_json row;
    row["method"] = r.method();
    row["controller"] = std::string(to_string(r.controller));
    row["trajectory"] = r.primitives ? "Primitives" : "PDS";
    row["terrain"] = r.terrain;
    row["metrics"] = metrics_json(r.result);
    row["runs"] = repetitions_json(r.result);
    rows.push_back(std::move(row));
  }
  return ordered_json{{"ablation", rows}}.dump(2) + "\n";
}

std::string obstacle_demo_json(ObstacleKind kind, ControllerKind controller,
                               const ObstacleDemoResult& result) {
  ordered_json j;
  j["obstacle"] = std::string(to_string(kind));
  j["controller"] = std::string(to_string(controller));
  j["metrics"] = metrics_json(result.result);
  j["runs"] = repetitions_json(result.result);
  j["contact_steps"] = result.contact_steps;
  j["min_feedforward_gain_in_contact"] = rounded(result.min_feedforward_gain_in_contact);
  return j.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepTable>& tables) {
  out << "parameter,level,value,terrain,repetitions,volume_mean,volume_stdev,pstop_rate,"
         "completion_pct\n";
  for (const SweepTable& t : tables) {
    for (const SweepCell& c : t.cells) {
      out << to_string(t.parameter) << ',' << to_string(c.level) << ',' << format_number(c.value)
          << ',' << t.terrain << ',' << c.result.repetitions.size() << ','
          << format_number(c.result.volume_mean) << ',' << format_number(c.result.volume_stdev)
          << ',' << format_number(c.result.pstop_rate) << ','
          << format_number(c.result.completion_pct) << '\n';
    }
  }
}

void write_ablation_csv(std::ostream& out, const AblationTable& table) {
  out << "method,terrain,repetitions,volume_mean,volume_stdev,pstop_rate,completion_pct\n";
  for (const AblationRow& r : table.rows) {
    out << r.method() << ',' << r.terrain << ',' << r.repetitions << ','
        << format_number(r.result.volume_mean) << ',' << format_number(r.result.volume_stdev)
        << ',' << format_number(r.result.pstop_rate) << ','
        << format_number(r.result.completion_pct) << '\n';
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents, bool overwrite) {
  if (!overwrite && std::filesystem::exists(path)) {
    throw std::runtime_error(path.string() + ": file exists (use --force to overwrite)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing: " + std::strerror(errno));
  out << contents;
  out.close();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace raic
