#pragma once

// Declarative YAML experiment configs.
//
//   kind: scenario | sweep | ablation      (default scenario)
//
// scenario / sweep keys:
//   terrain      required; a preset name or a mapping {preset: <name>, <field>: ...}
//   controller   required; RAIC | Impedance
//   name, seed, repetitions, pds, primitives, impedance, raic, limits,
//   dig_sites, obstacles, box, scoop
//   parameters   (sweep only) list of SwivelAmp | SwivelFreq | TwistAmp | TwistFreq | DiveS
// ablation keys:
//   terrains     required; list of preset names or terrain mappings
//   seed, repetitions, repetitions_by_terrain, pds, primitives, impedance, raic, limits
//
// Angles accept plain numbers or pi expressions such as `pi/8`, `3*pi/16`.
// Every omitted key takes its default.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "raic/harness.hpp"

namespace raic {

/// Config problem with its 1-based source line (0 when unknown) and dotted
/// field path. what() reads "source:line: field: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, std::string message, std::string source = {});
  int line() const { return line_; }
  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }
  const std::string& source() const { return source_; }
  /// Same error attributed to a file.
  ConfigError in_file(const std::string& source) const;

 private:
  int line_;
  std::string field_;
  std::string message_;
  std::string source_;
};

struct SweepSpec {
  std::vector<SweepParameter> parameters{kAllSweepParameters.begin(), kAllSweepParameters.end()};
  ScenarioConfig base;

  bool operator==(const SweepSpec&) const = default;
};

using ExperimentConfig = std::variant<ScenarioConfig, SweepSpec, AblationSpec>;

struct ConfigOptions {
  /// Directory of `<Name>.yaml` terrain preset files; built-ins are used for
  /// names it does not contain.
  std::filesystem::path preset_dir;
};

ExperimentConfig parse_config(std::string_view text, const ConfigOptions& options = {});
ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOptions& options = {});

/// Full config text with every field spelled out; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& config);

/// Terrain preset file: a flat mapping of TerrainModel fields.
TerrainModel parse_terrain(std::string_view text);
std::string render_terrain(const TerrainModel& model);

/// Resolves a preset name against options.preset_dir, then the built-ins.
TerrainModel resolve_terrain(const std::string& name, const ConfigOptions& options = {});

/// Sweep repetitions default: 6, or 12 on Slate.
int default_sweep_repetitions(const std::string& terrain);

}  // namespace raic
