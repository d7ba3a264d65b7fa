#include "raic/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

namespace raic {
namespace {

using KeySet = std::set<std::string, std::less<>>;

int line_of(const YAML::Node& node) {
  const int line = node.Mark().line;
  return line >= 0 ? line + 1 : 0;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string quoted_list(const KeySet& keys) {
  std::string out;
  for (const auto& k : keys) out += (out.empty() ? "" : ", ") + k;
  return out;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) {
  throw ConfigError(line_of(node), field, msg);
}

void require_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) fail(node, path, "expected a mapping");
}

void check_keys(const YAML::Node& node, const std::string& path, const KeySet& allowed) {
  require_map(node, path);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      fail(kv.first, join(path, key),
           "unknown key '" + key + "'" + (path.empty() ? "" : " in " + path) +
               "; expected one of: " + quoted_list(allowed));
    }
  }
}

// Plain number or a pi expression: [k*]pi[/n], e.g. "pi/8", "3*pi/16", "-pi".
std::optional<double> parse_number(const std::string& text) {
  std::istringstream in(text);
  double value = 0.0;
  if (in >> value && (in >> std::ws).eof()) return value;

  static const std::regex pi_expr(
      R"(^\s*([+-])?\s*(?:([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*\*?\s*)?pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pi_expr)) return std::nullopt;
  double v = std::numbers::pi;
  if (m[2].matched) v *= std::stod(m[2].str());
  if (m[3].matched) v /= std::stod(m[3].str());
  if (m[1].matched && m[1].str() == "-") v = -v;
  return v;
}

double as_double(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a number");
  const auto v = parse_number(node.Scalar());
  if (!v) fail(node, field, "'" + node.Scalar() + "' is not a number or pi expression");
  return *v;
}

void read(const YAML::Node& map, const std::string& path, const char* key, double& out) {
  if (const YAML::Node n = map[key]) out = as_double(n, join(path, key));
}

void read(const YAML::Node& map, const std::string& path, const char* key, int& out) {
  if (const YAML::Node n = map[key]) {
    try {
      out = n.as<int>();
    } catch (const YAML::Exception&) {
      fail(n, join(path, key), "expected an integer");
    }
  }
}

void read(const YAML::Node& map, const std::string& path, const char* key, std::uint64_t& out) {
  if (const YAML::Node n = map[key]) {
    try {
      out = n.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail(n, join(path, key), "expected a non-negative integer");
    }
  }
}

void read(const YAML::Node& map, const std::string& path, const char* key, std::string& out) {
  if (const YAML::Node n = map[key]) {
    if (!n.IsScalar()) fail(n, join(path, key), "expected a string");
    out = n.Scalar();
  }
}

Vec3 as_vec3(const YAML::Node& node, const std::string& field, bool allow_xy) {
  if (!node.IsSequence() || !(node.size() == 3 || (allow_xy && node.size() == 2))) {
    fail(node, field, allow_xy ? "expected [x, y] or [x, y, z]" : "expected [x, y, z]");
  }
  Vec3 v = Vec3::Zero();
  for (std::size_t i = 0; i < node.size(); ++i) {
    v[static_cast<int>(i)] = as_double(node[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

// Six-axis gain in wrench order, or [translational, rotational].
void read_axes(const YAML::Node& map, const std::string& path, const char* key, Vec6& out) {
  const YAML::Node n = map[key];
  if (!n) return;
  const std::string field = join(path, key);
  if (!n.IsSequence() || (n.size() != 6 && n.size() != 2)) {
    fail(n, field, "expected 6 values [x, y, z, rx, ry, rz] or 2 values [translational, rotational]");
  }
  if (n.size() == 2) {
    const double lin = as_double(n[0], field + "[0]");
    const double rot = as_double(n[1], field + "[1]");
    out << lin, lin, lin, rot, rot, rot;
    return;
  }
  for (int i = 0; i < 6; ++i) out[i] = as_double(n[i], field + "[" + std::to_string(i) + "]");
}

// Runs a validate() call and ties its failure to the offending key's line.
template <typename F>
void validated(const YAML::Node& map, const std::string& path, F&& validate) {
  try {
    validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const std::string field = msg.substr(0, msg.find_first_of(" =["));
    YAML::Node where = map;
    if (map && map.IsMap()) {
      if (const YAML::Node n = map[field]) where = n;
    }
    throw ConfigError(line_of(where), join(path, field), msg);
  }
}

// ---------------------------------------------------------------------------
// Sections

const KeySet kTerrainKeys = {"preset",
                             "name",
                             "surface_height",
                             "resistance_stiffness",
                             "drag_friction",
                             "rotational_drag",
                             "jam_onset_threshold",
                             "jam_stiffness",
                             "jam_release_travel",
                             "jam_density",
                             "capture_efficiency",
                             "spill_roll_threshold",
                             "rng_seed"};

TerrainModel read_terrain_fields(const YAML::Node& n, const std::string& path, TerrainModel m,
                                 bool require_all) {
  check_keys(n, path, kTerrainKeys);
  if (require_all) {
    std::string missing;
    for (const auto& key : kTerrainKeys) {
      if (key == "preset" || key == "rng_seed") continue;
      if (!n[key]) missing += (missing.empty() ? "" : ", ") + key;
    }
    if (!missing.empty()) fail(n, path, "missing required terrain fields: " + missing);
  }
  read(n, path, "name", m.name);
  read(n, path, "surface_height", m.surface_height);
  read(n, path, "resistance_stiffness", m.resistance_stiffness);
  read(n, path, "drag_friction", m.drag_friction);
  read(n, path, "rotational_drag", m.rotational_drag);
  read(n, path, "jam_onset_threshold", m.jam_onset_threshold);
  read(n, path, "jam_stiffness", m.jam_stiffness);
  read(n, path, "jam_release_travel", m.jam_release_travel);
  read(n, path, "jam_density", m.jam_density);
  read(n, path, "capture_efficiency", m.capture_efficiency);
  read(n, path, "spill_roll_threshold", m.spill_roll_threshold);
  read(n, path, "rng_seed", m.rng_seed);
  validated(n, path, [&] { m.validate(); });
  return m;
}

TerrainModel read_terrain(const YAML::Node& n, const std::string& path,
                          const ConfigOptions& options) {
  if (n.IsScalar()) {
    try {
      return resolve_terrain(n.Scalar(), options);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(n, path, e.what());
    }
  }
  require_map(n, path);
  if (const YAML::Node preset = n["preset"]) {
    TerrainModel base;
    try {
      base = resolve_terrain(preset.as<std::string>(), options);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(preset, join(path, "preset"), e.what());
    }
    return read_terrain_fields(n, path, base, false);
  }
  return read_terrain_fields(n, path, TerrainModel{}, true);
}

PdsParams read_pds(const YAML::Node& n, const std::string& path, PdsParams p) {
  check_keys(n, path,
             {"heading", "attack_angle", "depth", "drag_length", "closing_angle", "lift_height",
              "tip_speed", "scoop_rotation_time", "sample_dt"});
  read(n, path, "heading", p.heading);
  read(n, path, "attack_angle", p.attack_angle);
  read(n, path, "depth", p.depth);
  read(n, path, "drag_length", p.drag_length);
  read(n, path, "closing_angle", p.closing_angle);
  read(n, path, "lift_height", p.lift_height);
  read(n, path, "tip_speed", p.tip_speed);
  read(n, path, "scoop_rotation_time", p.scoop_rotation_time);
  read(n, path, "sample_dt", p.sample_dt);
  validated(n, path, [&] { p.validate(); });
  return p;
}

PrimitiveParams read_primitives(const YAML::Node& n, const std::string& path, PrimitiveParams p) {
  check_keys(n, path,
             {"swivel_amplitude", "swivel_frequency", "twist_amplitude", "twist_frequency", "dive"});
  read(n, path, "swivel_amplitude", p.swivel_amplitude);
  read(n, path, "swivel_frequency", p.swivel_frequency);
  read(n, path, "twist_amplitude", p.twist_amplitude);
  read(n, path, "twist_frequency", p.twist_frequency);
  read(n, path, "dive", p.dive);
  validated(n, path, [&] { p.validate(); });
  return p;
}

ImpedanceGains read_impedance(const YAML::Node& n, const std::string& path) {
  check_keys(n, path, {"stiffness", "damping", "inertia"});
  ImpedanceGains g = ImpedanceGains::defaults();
  read_axes(n, path, "stiffness", g.stiffness);
  read_axes(n, path, "damping", g.damping);
  read_axes(n, path, "inertia", g.inertia);
  validated(n, path, [&] { g.validate(); });
  return g;
}

PStopLimits read_limits(const YAML::Node& n, const std::string& path) {
  check_keys(n, path, {"force", "torque"});
  PStopLimits l;
  read(n, path, "force", l.force);
  read(n, path, "torque", l.torque);
  if (!(l.force > 0.0)) fail(n["force"] ? n["force"] : n, join(path, "force"), "force must be > 0");
  if (!(l.torque > 0.0)) {
    fail(n["torque"] ? n["torque"] : n, join(path, "torque"), "torque must be > 0");
  }
  return l;
}

RaicGains read_raic(const YAML::Node& n, const std::string& path, const PStopLimits& limits) {
  RaicGains g = RaicGains::from_limits(limits.force, limits.torque);
  if (!n) return g;
  check_keys(n, path, {"cutoff", "scale", "feedback_cutoff", "feedback_scale"});
  read_axes(n, path, "cutoff", g.cutoff);
  read_axes(n, path, "scale", g.scale);
  read_axes(n, path, "feedback_cutoff", g.feedback_cutoff);
  read_axes(n, path, "feedback_scale", g.feedback_scale);
  validated(n, path, [&] { g.validate(); });
  return g;
}

ControllerKind read_controller(const YAML::Node& n, const std::string& field) {
  if (n.IsScalar()) {
    std::string v = n.Scalar();
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "raic") return ControllerKind::Raic;
    if (v == "impedance") return ControllerKind::Impedance;
  }
  fail(n, field, "controller must be RAIC or Impedance");
}

ObstacleModel read_obstacle(const YAML::Node& n, const std::string& path,
                            const TerrainModel& terrain) {
  require_map(n, path);
  const YAML::Node kind = n["kind"];
  if (!kind || !kind.IsScalar()) fail(n, join(path, "kind"), "missing obstacle kind (slope | rock)");
  ObstacleModel o;
  double stiffness = o.contact_stiffness;
  if (kind.Scalar() == "rock") {
    check_keys(n, path, {"kind", "center", "radius", "contact_stiffness"});
    if (!n["center"] || !n["radius"]) fail(n, path, "rock needs center and radius");
    read(n, path, "contact_stiffness", stiffness);
    double radius = 0.0;
    read(n, path, "radius", radius);
    o = ObstacleModel::rock(as_vec3(n["center"], join(path, "center"), false), radius, stiffness);
  } else if (kind.Scalar() == "slope") {
    check_keys(n, path,
               {"kind", "foot", "heading", "incline", "normal", "offset", "top_height",
                "contact_stiffness"});
    read(n, path, "contact_stiffness", stiffness);
    double top = 0.0;
    read(n, path, "top_height", top);
    if (n["normal"]) {
      if (!n["offset"]) fail(n, path, "slope given by normal also needs offset");
      o.kind = ObstacleModel::Kind::RigidSlope;
      o.normal = as_vec3(n["normal"], join(path, "normal"), false);
      read(n, path, "offset", o.offset);
      o.top_height = top;
      o.contact_stiffness = stiffness;
    } else {
      if (!n["foot"] || !n["incline"]) fail(n, path, "slope needs foot and incline (or normal and offset)");
      double heading = 0.0, incline = 0.0;
      read(n, path, "heading", heading);
      read(n, path, "incline", incline);
      o = ObstacleModel::slope(as_vec3(n["foot"], join(path, "foot"), false), heading, incline, top,
                               stiffness);
    }
  } else {
    fail(kind, join(path, "kind"), "obstacle kind must be slope or rock");
  }
  validated(n, path, [&] { o.validate(terrain); });
  return o;
}

TerrainBox read_box(const YAML::Node& n, const std::string& path) {
  check_keys(n, path, {"x_min", "y_min", "x_size", "y_size", "depth", "cell_size"});
  TerrainBox b;
  read(n, path, "x_min", b.x_min);
  read(n, path, "y_min", b.y_min);
  read(n, path, "x_size", b.x_size);
  read(n, path, "y_size", b.y_size);
  read(n, path, "depth", b.depth);
  read(n, path, "cell_size", b.cell_size);
  if (!(b.cell_size > 0.0 && b.x_size > 0.0 && b.y_size > 0.0)) {
    fail(n, path, "box sizes and cell_size must be > 0");
  }
  return b;
}

ScoopGeometry read_scoop(const YAML::Node& n, const std::string& path) {
  check_keys(n, path, {"width", "length", "edge_samples", "lookahead"});
  ScoopGeometry g;
  read(n, path, "width", g.width);
  read(n, path, "length", g.length);
  read(n, path, "edge_samples", g.edge_samples);
  read(n, path, "lookahead", g.lookahead);
  if (!(g.width > 0.0) || g.edge_samples < 2 || !(g.lookahead >= 0.0)) {
    fail(n, path, "scoop needs width > 0, edge_samples >= 2, lookahead >= 0");
  }
  return g;
}

void require_fields(const YAML::Node& root, std::initializer_list<const char*> fields) {
  std::string missing;
  for (const char* f : fields) {
    if (!root || !root.IsMap() || !root[f]) missing += (missing.empty() ? "" : ", ") + std::string(f);
  }
  if (!missing.empty()) {
    throw ConfigError(root && root.IsMap() ? line_of(root) : 0, "",
                      "missing required fields: " + missing);
  }
}

const KeySet kScenarioKeys = {"kind",       "name",    "terrain",   "controller", "seed",
                              "repetitions", "pds",    "primitives", "impedance", "raic",
                              "limits",     "dig_sites", "obstacles", "box",      "scoop"};

ScenarioConfig read_scenario(const YAML::Node& root, const ConfigOptions& options,
                             const KeySet& allowed) {
  require_fields(root, {"terrain", "controller"});
  check_keys(root, "", allowed);
  ScenarioConfig c;
  read(root, "", "name", c.name);
  c.terrain = read_terrain(root["terrain"], "terrain", options);
  c.controller = read_controller(root["controller"], "controller");
  read(root, "", "seed", c.seed);
  read(root, "", "repetitions", c.repetitions);
  if (c.repetitions < 1) fail(root["repetitions"], "repetitions", "repetitions must be >= 1");
  if (const YAML::Node n = root["pds"]) c.pds = read_pds(n, "pds", c.pds);
  if (const YAML::Node n = root["primitives"]) c.primitives = read_primitives(n, "primitives", {});
  if (const YAML::Node n = root["impedance"]) c.impedance = read_impedance(n, "impedance");
  if (const YAML::Node n = root["limits"]) c.limits = read_limits(n, "limits");
  c.raic = read_raic(root["raic"], "raic", c.limits);
  if (const YAML::Node n = root["dig_sites"]) {
    if (!n.IsSequence() || n.size() == 0) fail(n, "dig_sites", "expected a non-empty list of [x, y]");
    c.dig_sites.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      c.dig_sites.push_back(as_vec3(n[i], "dig_sites[" + std::to_string(i) + "]", true));
    }
  }
  if (const YAML::Node n = root["obstacles"]) {
    if (!n.IsSequence()) fail(n, "obstacles", "expected a list");
    for (std::size_t i = 0; i < n.size(); ++i) {
      c.obstacles.push_back(read_obstacle(n[i], "obstacles[" + std::to_string(i) + "]", c.terrain));
    }
  }
  if (const YAML::Node n = root["box"]) c.box = read_box(n, "box");
  if (const YAML::Node n = root["scoop"]) c.scoop = read_scoop(n, "scoop");
  return c;
}

SweepSpec read_sweep(const YAML::Node& root, const ConfigOptions& options) {
  KeySet allowed = kScenarioKeys;
  allowed.insert("parameters");
  SweepSpec s;
  s.base = read_scenario(root, options, allowed);
  if (!root["repetitions"]) s.base.repetitions = default_sweep_repetitions(s.base.terrain.name);
  if (const YAML::Node n = root["parameters"]) {
    if (!n.IsSequence() || n.size() == 0) fail(n, "parameters", "expected a non-empty list");
    s.parameters.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      const auto p = sweep_parameter_from_string(n[i].as<std::string>());
      if (!p) {
        fail(n[i], "parameters[" + std::to_string(i) + "]",
             "unknown sweep parameter '" + n[i].as<std::string>() +
                 "'; expected SwivelAmp, SwivelFreq, TwistAmp, TwistFreq or DiveS");
      }
      s.parameters.push_back(*p);
    }
  }
  return s;
}

AblationSpec read_ablation(const YAML::Node& root, const ConfigOptions& options) {
  require_fields(root, {"terrains"});
  check_keys(root, "",
             {"kind", "terrains", "seed", "repetitions", "repetitions_by_terrain", "pds",
              "primitives", "impedance", "raic", "limits"});
  AblationSpec a = AblationSpec::defaults();
  const YAML::Node terrains = root["terrains"];
  if (!terrains.IsSequence() || terrains.size() == 0) {
    fail(terrains, "terrains", "expected a non-empty list of terrain presets");
  }
  a.terrains.clear();
  for (std::size_t i = 0; i < terrains.size(); ++i) {
    a.terrains.push_back(read_terrain(terrains[i], "terrains[" + std::to_string(i) + "]", options));
  }
  read(root, "", "seed", a.seed);
  read(root, "", "repetitions", a.repetitions);
  if (a.repetitions < 1) fail(root["repetitions"], "repetitions", "repetitions must be >= 1");
  if (const YAML::Node n = root["repetitions_by_terrain"]) {
    require_map(n, "repetitions_by_terrain");
    a.repetitions_by_terrain.clear();
    for (const auto& kv : n) {
      const auto name = kv.first.as<std::string>();
      int reps = 0;
      read(n, "repetitions_by_terrain", name.c_str(), reps);
      if (reps < 1) fail(kv.second, "repetitions_by_terrain." + name, "repetitions must be >= 1");
      a.repetitions_by_terrain[name] = reps;
    }
  }
  if (const YAML::Node n = root["pds"]) a.pds = read_pds(n, "pds", a.pds);
  if (const YAML::Node n = root["primitives"]) a.primitives = read_primitives(n, "primitives", {});
  if (const YAML::Node n = root["impedance"]) a.impedance = read_impedance(n, "impedance");
  if (const YAML::Node n = root["limits"]) a.limits = read_limits(n, "limits");
  a.raic = read_raic(root["raic"], "raic", a.limits);
  return a;
}

YAML::Node load_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, "", e.msg);
  }
}

// ---------------------------------------------------------------------------
// Rendering

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void emit_vec(YAML::Emitter& out, const auto& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) out << num(v[i]);
  out << YAML::EndSeq;
}

void emit_terrain_fields(YAML::Emitter& out, const TerrainModel& m) {
  out << YAML::Key << "name" << YAML::Value << m.name;
  out << YAML::Key << "surface_height" << YAML::Value << num(m.surface_height);
  out << YAML::Key << "resistance_stiffness" << YAML::Value << num(m.resistance_stiffness);
  out << YAML::Key << "drag_friction" << YAML::Value << num(m.drag_friction);
  out << YAML::Key << "rotational_drag" << YAML::Value << num(m.rotational_drag);
  out << YAML::Key << "jam_onset_threshold" << YAML::Value << num(m.jam_onset_threshold);
  out << YAML::Key << "jam_stiffness" << YAML::Value << num(m.jam_stiffness);
  out << YAML::Key << "jam_release_travel" << YAML::Value << num(m.jam_release_travel);
  out << YAML::Key << "jam_density" << YAML::Value << num(m.jam_density);
  out << YAML::Key << "capture_efficiency" << YAML::Value << num(m.capture_efficiency);
  out << YAML::Key << "spill_roll_threshold" << YAML::Value << num(m.spill_roll_threshold);
  out << YAML::Key << "rng_seed" << YAML::Value << m.rng_seed;
}

void emit_terrain(YAML::Emitter& out, const TerrainModel& m) {
  out << YAML::BeginMap;
  emit_terrain_fields(out, m);
  out << YAML::EndMap;
}

void emit_common(YAML::Emitter& out, const PdsParams& p, const PrimitiveParams& prim,
                 const ImpedanceGains& imp, const RaicGains& raic, const PStopLimits& limits) {
  out << YAML::Key << "pds" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "heading" << YAML::Value << num(p.heading);
  out << YAML::Key << "attack_angle" << YAML::Value << num(p.attack_angle);
  out << YAML::Key << "depth" << YAML::Value << num(p.depth);
  out << YAML::Key << "drag_length" << YAML::Value << num(p.drag_length);
  out << YAML::Key << "closing_angle" << YAML::Value << num(p.closing_angle);
  out << YAML::Key << "lift_height" << YAML::Value << num(p.lift_height);
  out << YAML::Key << "tip_speed" << YAML::Value << num(p.tip_speed);
  out << YAML::Key << "scoop_rotation_time" << YAML::Value << num(p.scoop_rotation_time);
  out << YAML::Key << "sample_dt" << YAML::Value << num(p.sample_dt);
  out << YAML::EndMap;

  out << YAML::Key << "primitives" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "swivel_amplitude" << YAML::Value << num(prim.swivel_amplitude);
  out << YAML::Key << "swivel_frequency" << YAML::Value << num(prim.swivel_frequency);
  out << YAML::Key << "twist_amplitude" << YAML::Value << num(prim.twist_amplitude);
  out << YAML::Key << "twist_frequency" << YAML::Value << num(prim.twist_frequency);
  out << YAML::Key << "dive" << YAML::Value << num(prim.dive);
  out << YAML::EndMap;

  out << YAML::Key << "impedance" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "stiffness" << YAML::Value;
  emit_vec(out, imp.stiffness);
  out << YAML::Key << "damping" << YAML::Value;
  emit_vec(out, imp.damping);
  out << YAML::Key << "inertia" << YAML::Value;
  emit_vec(out, imp.inertia);
  out << YAML::EndMap;

  out << YAML::Key << "limits" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "force" << YAML::Value << num(limits.force);
  out << YAML::Key << "torque" << YAML::Value << num(limits.torque);
  out << YAML::EndMap;

  out << YAML::Key << "raic" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "cutoff" << YAML::Value;
  emit_vec(out, raic.cutoff);
  out << YAML::Key << "scale" << YAML::Value;
  emit_vec(out, raic.scale);
  out << YAML::Key << "feedback_cutoff" << YAML::Value;
  emit_vec(out, raic.feedback_cutoff);
  out << YAML::Key << "feedback_scale" << YAML::Value;
  emit_vec(out, raic.feedback_scale);
  out << YAML::EndMap;
}

void emit_scenario_body(YAML::Emitter& out, const ScenarioConfig& c) {
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "terrain" << YAML::Value;
  emit_terrain(out, c.terrain);
  out << YAML::Key << "controller" << YAML::Value << std::string(to_string(c.controller));
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "repetitions" << YAML::Value << c.repetitions;
  emit_common(out, c.pds, c.primitives, c.impedance, c.raic, c.limits);

  out << YAML::Key << "dig_sites" << YAML::Value << YAML::BeginSeq;
  for (const Vec3& s : c.dig_sites) emit_vec(out, s);
  out << YAML::EndSeq;

  out << YAML::Key << "obstacles" << YAML::Value << YAML::BeginSeq;
  for (const ObstacleModel& o : c.obstacles) {
    out << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(o.kind));
    if (o.kind == ObstacleModel::Kind::BuriedRock) {
      out << YAML::Key << "center" << YAML::Value;
      emit_vec(out, o.center);
      out << YAML::Key << "radius" << YAML::Value << num(o.radius);
    } else {
      out << YAML::Key << "normal" << YAML::Value;
      emit_vec(out, o.normal);
      out << YAML::Key << "offset" << YAML::Value << num(o.offset);
      out << YAML::Key << "top_height" << YAML::Value << num(o.top_height);
    }
    out << YAML::Key << "contact_stiffness" << YAML::Value << num(o.contact_stiffness);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "box" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "x_min" << YAML::Value << num(c.box.x_min);
  out << YAML::Key << "y_min" << YAML::Value << num(c.box.y_min);
  out << YAML::Key << "x_size" << YAML::Value << num(c.box.x_size);
  out << YAML::Key << "y_size" << YAML::Value << num(c.box.y_size);
  out << YAML::Key << "depth" << YAML::Value << num(c.box.depth);
  out << YAML::Key << "cell_size" << YAML::Value << num(c.box.cell_size);
  out << YAML::EndMap;

  out << YAML::Key << "scoop" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "width" << YAML::Value << num(c.scoop.width);
  out << YAML::Key << "length" << YAML::Value << num(c.scoop.length);
  out << YAML::Key << "edge_samples" << YAML::Value << c.scoop.edge_samples;
  out << YAML::Key << "lookahead" << YAML::Value << num(c.scoop.lookahead);
  out << YAML::EndMap;
}

}  // namespace

namespace {

std::string describe_error(int line, const std::string& field, const std::string& message,
                           const std::string& source) {
  std::string out = source;
  if (line > 0) out += (out.empty() ? "line " : ":") + std::to_string(line);
  if (!out.empty()) out += ": ";
  if (!field.empty()) out += field + ": ";
  return out + message;
}

}  // namespace

ConfigError::ConfigError(int line, std::string field, std::string message, std::string source)
    : std::runtime_error(describe_error(line, field, message, source)),
      line_(line),
      field_(std::move(field)),
      message_(std::move(message)),
      source_(std::move(source)) {}

ConfigError ConfigError::in_file(const std::string& source) const {
  return ConfigError(line_, field_, message_, source);
}

int default_sweep_repetitions(const std::string& terrain) { return terrain == "Slate" ? 12 : 6; }

TerrainModel resolve_terrain(const std::string& name, const ConfigOptions& options) {
  if (!options.preset_dir.empty()) {
    const auto path = options.preset_dir / (name + ".yaml");
    if (std::filesystem::exists(path)) {
      std::ifstream in(path);
      std::stringstream text;
      text << in.rdbuf();
      try {
        return parse_terrain(text.str());
      } catch (const ConfigError& e) {
        throw e.in_file(path.string());
      }
    }
  }
  const auto material = material_from_string(name);
  if (!material) {
    throw std::invalid_argument("unknown terrain preset '" + name +
                                "'; expected Pebbles, Gravel, Slate or Mulch");
  }
  return terrain_preset(*material);
}

TerrainModel parse_terrain(std::string_view text) {
  const YAML::Node root = load_yaml(text);
  if (!root || !root.IsMap()) throw ConfigError(0, "", "terrain preset must be a mapping");
  if (root["preset"]) fail(root["preset"], "preset", "preset files cannot reference other presets");
  return read_terrain_fields(root, "", TerrainModel{}, true);
}

std::string render_terrain(const TerrainModel& model) {
  YAML::Emitter out;
  emit_terrain(out, model);
  return "# Terrain preset. Calibrated simulation constants, not measured material properties.\n" +
         std::string(out.c_str()) + "\n";
}

ExperimentConfig parse_config(std::string_view text, const ConfigOptions& options) {
  const YAML::Node root = load_yaml(text);
  if (root && !root.IsNull() && !root.IsMap()) {
    throw ConfigError(line_of(root), "", "config must be a mapping of keys");
  }
  std::string kind = "scenario";
  if (root && root.IsMap()) read(root, "", "kind", kind);
  if (kind == "scenario") return read_scenario(root, options, kScenarioKeys);
  if (kind == "sweep") return read_sweep(root, options);
  if (kind == "ablation") return read_ablation(root, options);
  fail(root["kind"], "kind", "kind must be scenario, sweep or ablation");
}

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open config file");
  std::stringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str(), options);
  } catch (const ConfigError& e) {
    if (!e.source().empty()) throw;
    throw e.in_file(path.string());
  }
}

std::string render_config(const ExperimentConfig& config) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  if (const auto* c = std::get_if<ScenarioConfig>(&config)) {
    out << YAML::Key << "kind" << YAML::Value << "scenario";
    emit_scenario_body(out, *c);
  } else if (const auto* s = std::get_if<SweepSpec>(&config)) {
    out << YAML::Key << "kind" << YAML::Value << "sweep";
    emit_scenario_body(out, s->base);
    out << YAML::Key << "parameters" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (SweepParameter p : s->parameters) out << std::string(to_string(p));
    out << YAML::EndSeq;
  } else {
    const auto& a = std::get<AblationSpec>(config);
    out << YAML::Key << "kind" << YAML::Value << "ablation";
    out << YAML::Key << "terrains" << YAML::Value << YAML::BeginSeq;
    for (const TerrainModel& t : a.terrains) emit_terrain(out, t);
    out << YAML::EndSeq;
    out << YAML::Key << "seed" << YAML::Value << a.seed;
    out << YAML::Key << "repetitions" << YAML::Value << a.repetitions;
    out << YAML::Key << "repetitions_by_terrain" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, reps] : a.repetitions_by_terrain) {
      out << YAML::Key << name << YAML::Value << reps;
    }
    out << YAML::EndMap;
    emit_common(out, a.pds, a.primitives, a.impedance, a.raic, a.limits);
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace raic
