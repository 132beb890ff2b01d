#pragma once

// JSON run configuration. Unknown keys are rejected; every default that
// gets filled in is recorded in RunConfig::notes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rodwave/cell_scattering.hpp"
#include "rodwave/errors.hpp"
#include "rodwave/materials.hpp"

namespace rodwave {

struct Geometry {
  std::string piezo_material = "AlN";
  std::string bottom_metal = "Pt";
  std::string top_metal = "Al";
  double t_aln1 = 400e-9;  // piezo under the trench
  double t_aln2 = 600e-9;  // piezo in the rod
  double t_m1 = 250e-9;    // bottom metal
  double t_m2 = 330e-9;    // top metal
  double a = 2.0e-6;
  double L = 4.6e-6;
};

struct SweepSettings {
  double f_start = 1e8;
  double f_stop = 6e9;
  int points = 2000;
};

struct GeometrySweep {
  std::string parameter;  // a, L, t_aln1, t_aln2, t_m1, t_m2
  double from{};
  double to{};
  int steps = 1;

  std::vector<double> values() const {
    if (from == to) return {from};
    std::vector<double> v;
    for (int i = 0; i < steps; ++i) v.push_back(i == steps - 1 ? to : from + (to - from) * i / (steps - 1));
    return v;
  }
};

struct OutputSettings {
  std::string directory = "rodwave_out";
  bool plot = false;
};

struct RunConfig {
  MaterialLibrary materials = defaults::material_library();
  Geometry geometry;
  SweepSettings sweep;
  std::optional<GeometrySweep> geometry_sweep;
  OutputSettings output;
  std::vector<std::string> notes;  // defaults applied while loading

  const Material& material(const std::string& name, const std::string& path) const {
    auto it = materials.find(name);
    if (it == materials.end()) throw ConfigError("unknown material '" + name + "'", path);
    return it->second;
  }

  StackSpec stack(const Geometry& g) const {
    StackSpec s;
    s.piezo = material(g.piezo_material, "geometry.piezo_material");
    s.bottom_metal = material(g.bottom_metal, "geometry.bottom_metal");
    s.top_metal = material(g.top_metal, "geometry.top_metal");
    s.t_piezo_trench = g.t_aln1;
    s.t_piezo_rod = g.t_aln2;
    s.t_bottom_metal = g.t_m1;
    s.t_top_metal = g.t_m2;
    return s;
  }

  UnitCell cell(const Geometry& g) const { return UnitCell(stack(g), g.a, g.L); }
  UnitCell cell() const { return cell(geometry); }
};

inline const std::vector<std::string>& length_parameters() {
  static const std::vector<std::string> names = {"a", "L", "t_aln1", "t_aln2", "t_m1", "t_m2"};
  return names;
}

inline double& geometry_field(Geometry& g, const std::string& name) {
  if (name == "a") return g.a;
  if (name == "L") return g.L;
  if (name == "t_aln1") return g.t_aln1;
  if (name == "t_aln2") return g.t_aln2;
  if (name == "t_m1") return g.t_m1;
  if (name == "t_m2") return g.t_m2;
  throw ConfigError("unknown geometry parameter '" + name + "'", "geometry_sweep.parameter");
}

inline double geometry_field(const Geometry& g, const std::string& name) {
  Geometry copy = g;
  return geometry_field(copy, name);
}

namespace detail {

using json = nlohmann::json;

inline std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + " must be a JSON object", path);
}

inline double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + " must be a number", path);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + " must be finite", path);
  return v;
}

inline int integer_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + " must be an integer", path);
  return j.get<int>();
}

inline std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + " must be a string", path);
  return j.get<std::string>();
}

struct LengthKey {
  std::string base;
  double per_metre;  // divide by this; exact powers of ten keep 2.5 um == 2500 nm bit-for-bit
  double to_metres(double v) const { return v / per_metre; }
};

// "t_aln1_nm" -> {"t_aln1", 1e9}
inline std::optional<LengthKey> split_length_key(const std::string& key) {
  static const std::pair<const char*, double> suffixes[] = {{"_nm", 1e9}, {"_um", 1e6}, {"_m", 1.0}};
  for (const auto& [suffix, per_metre] : suffixes) {
    const std::string s(suffix);
    if (key.size() > s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0)
      return LengthKey{key.substr(0, key.size() - s.size()), per_metre};
  }
  return std::nullopt;
}

inline void parse_materials(const json& j, RunConfig& cfg) {
  require_object(j, "materials");
  for (const auto& [name, entry] : j.items()) {
    const std::string path = "materials." + name;
    require_object(entry, path);
    auto existing = cfg.materials.find(name);
    std::optional<double> E, rho;
    for (const auto& [key, value] : entry.items()) {
      if (key == "youngs_modulus_pa")
        E = number_at(value, path + "." + key);
      else if (key == "density_kg_m3")
        rho = number_at(value, path + "." + key);
      else
        throw ConfigError("unknown key '" + key + "'", path + "." + key);
    }
    if (existing == cfg.materials.end() && (!E || !rho))
      throw ConfigError("new material needs youngs_modulus_pa and density_kg_m3", path);
    if (existing != cfg.materials.end()) {
      if (!E) {
        E = existing->second.youngs_modulus;
        cfg.notes.push_back(path + ".youngs_modulus_pa defaulted to " + fmt_g(*E));
      }
      if (!rho) {
        rho = existing->second.density;
        cfg.notes.push_back(path + ".density_kg_m3 defaulted to " + fmt_g(*rho));
      }
    }
    try {
      cfg.materials[name] = Material(name, *E, *rho);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), path);
    }
  }
}

inline void parse_geometry(const json& j, RunConfig& cfg) {
  require_object(j, "geometry");
  Geometry& g = cfg.geometry;
  std::vector<std::string> seen;
  for (const auto& [key, value] : j.items()) {
    const std::string path = "geometry." + key;
    if (key == "piezo_material") {
      g.piezo_material = string_at(value, path);
    } else if (key == "bottom_metal") {
      g.bottom_metal = string_at(value, path);
    } else if (key == "top_metal") {
      g.top_metal = string_at(value, path);
    } else if (auto lk = split_length_key(key); lk && std::find(length_parameters().begin(),
                                                                length_parameters().end(),
                                                                lk->base) != length_parameters().end()) {
      if (std::find(seen.begin(), seen.end(), lk->base) != seen.end())
        throw ConfigError("geometry." + lk->base + " given more than once", path);
      seen.push_back(lk->base);
      geometry_field(g, lk->base) = lk->to_metres(number_at(value, path));
    } else {
      throw ConfigError("unknown key '" + key + "'", path);
    }
  }
  for (const auto& name : length_parameters())
    if (std::find(seen.begin(), seen.end(), name) == seen.end())
      cfg.notes.push_back("geometry." + name + " defaulted to " + fmt_g(geometry_field(g, name)) + " m");
  for (const char* key : {"piezo_material", "bottom_metal", "top_metal"})
    if (!j.contains(key)) cfg.notes.push_back(std::string("geometry.") + key + " defaulted");
}

inline void parse_sweep(const json& j, RunConfig& cfg) {
  require_object(j, "sweep");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "sweep." + key;
    if (key == "f_start_hz")
      cfg.sweep.f_start = number_at(value, path);
    else if (key == "f_stop_hz")
      cfg.sweep.f_stop = number_at(value, path);
    else if (key == "points")
      cfg.sweep.points = integer_at(value, path);
    else
      throw ConfigError("unknown key '" + key + "'", path);
  }
  for (const char* key : {"f_start_hz", "f_stop_hz", "points"})
    if (!j.contains(key)) cfg.notes.push_back(std::string("sweep.") + key + " defaulted");
}

inline void parse_geometry_sweep(const json& j, RunConfig& cfg) {
  require_object(j, "geometry_sweep");
  GeometrySweep gs;
  std::optional<double> from, to;
  std::optional<int> steps;
  for (const auto& [key, value] : j.items()) {
    const std::string path = "geometry_sweep." + key;
    if (key == "parameter") {
      gs.parameter = string_at(value, path);
      const auto& names = length_parameters();
      if (std::find(names.begin(), names.end(), gs.parameter) == names.end())
        throw ConfigError("parameter must be one of a, L, t_aln1, t_aln2, t_m1, t_m2", path);
    } else if (key == "steps") {
      steps = integer_at(value, path);
    } else if (auto lk = split_length_key(key); lk && (lk->base == "from" || lk->base == "to")) {
      auto& slot = lk->base == "from" ? from : to;
      if (slot) throw ConfigError("geometry_sweep." + lk->base + " given more than once", path);
      slot = lk->to_metres(number_at(value, path));
    } else {
      throw ConfigError("unknown key '" + key + "'", path);
    }
  }
  if (gs.parameter.empty()) throw ConfigError("parameter is required", "geometry_sweep.parameter");
  if (!from) throw ConfigError("from_<unit> is required", "geometry_sweep.from");
  if (!to) throw ConfigError("to_<unit> is required", "geometry_sweep.to");
  gs.from = *from;
  gs.to = *to;
  if (!steps) {
    steps = gs.from == gs.to ? 1 : 11;
    cfg.notes.push_back("geometry_sweep.steps defaulted to " + std::to_string(*steps));
  }
  gs.steps = *steps;
  if (gs.from != gs.to && gs.steps < 2)
    throw ConfigError("steps must be >= 2 for a non-empty range", "geometry_sweep.steps");
  if (gs.steps < 1) throw ConfigError("steps must be >= 1", "geometry_sweep.steps");
  cfg.geometry_sweep = gs;
}

inline void parse_output(const json& j, RunConfig& cfg) {
  require_object(j, "output");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "output." + key;
    if (key == "directory")
      cfg.output.directory = string_at(value, path);
    else if (key == "plot") {
      if (!value.is_boolean()) throw ConfigError(path + " must be true or false", path);
      cfg.output.plot = value.get<bool>();
    } else
      throw ConfigError("unknown key '" + key + "'", path);
  }
}

inline void validate(const RunConfig& cfg) {
  const Geometry& g = cfg.geometry;
  for (const auto& name : length_parameters()) {
    const double v = geometry_field(g, name);
    if (!(v > 0.0)) throw ConfigError("geometry." + name + " must be > 0", "geometry." + name);
  }
  if (!(g.a < g.L))
    throw ConfigError("geometry.a (" + fmt_g(g.a) + " m) must be smaller than geometry.L (" +
                          fmt_g(g.L) + " m)",
                      "geometry.a, geometry.L");
  cfg.stack(g);  // material names resolve
  if (!(cfg.sweep.f_start > 0.0)) throw ConfigError("sweep.f_start_hz must be > 0", "sweep.f_start_hz");
  if (!(cfg.sweep.f_stop > cfg.sweep.f_start))
    throw ConfigError("sweep.f_stop_hz must exceed sweep.f_start_hz", "sweep.f_stop_hz");
  if (cfg.sweep.points < 2) throw ConfigError("sweep.points must be >= 2", "sweep.points");
  if (cfg.geometry_sweep) {
    const auto& gs = *cfg.geometry_sweep;
    if (!(gs.from > 0.0) || !(gs.to > 0.0))
      throw ConfigError("geometry_sweep range must be positive", "geometry_sweep");
  }
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::json;
  RunConfig cfg;
  detail::require_object(j, "$");
  for (const auto& [key, value] : j.items()) {
    if (key == "materials")
      detail::parse_materials(value, cfg);
    else if (key == "geometry")
      detail::parse_geometry(value, cfg);
    else if (key == "sweep")
      detail::parse_sweep(value, cfg);
    else if (key == "geometry_sweep")
      detail::parse_geometry_sweep(value, cfg);
    else if (key == "output")
      detail::parse_output(value, cfg);
    else
      throw ConfigError("unknown key '" + key + "'", key);
  }
  if (!j.contains("materials")) cfg.notes.push_back("materials defaulted (AlN, Al, Pt)");
  if (!j.contains("geometry")) detail::parse_geometry(json::object(), cfg);
  if (!j.contains("sweep")) detail::parse_sweep(json::object(), cfg);
  if (!j.contains("output")) cfg.notes.push_back("output defaulted to directory " + cfg.output.directory);
  detail::validate(cfg);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what(), path);
  }
  return parse_config(j);
}

/// Resolved configuration as canonical JSON (output settings excluded).
inline nlohmann::json resolved_json(const RunConfig& cfg) {
  nlohmann::json j;
  for (const auto& [name, m] : cfg.materials)
    j["materials"][name] = {{"youngs_modulus_pa", m.youngs_modulus}, {"density_kg_m3", m.density}};
  const Geometry& g = cfg.geometry;
  j["geometry"] = {{"piezo_material", g.piezo_material}, {"bottom_metal", g.bottom_metal},
                   {"top_metal", g.top_metal},           {"t_aln1_m", g.t_aln1},
                   {"t_aln2_m", g.t_aln2},               {"t_m1_m", g.t_m1},
                   {"t_m2_m", g.t_m2},                   {"a_m", g.a},
                   {"L_m", g.L}};
  j["sweep"] = {{"f_start_hz", cfg.sweep.f_start}, {"f_stop_hz", cfg.sweep.f_stop},
                {"points", cfg.sweep.points}};
  if (cfg.geometry_sweep)
    j["geometry_sweep"] = {{"parameter", cfg.geometry_sweep->parameter},
                           {"from_m", cfg.geometry_sweep->from},
                           {"to_m", cfg.geometry_sweep->to},
                           {"steps", cfg.geometry_sweep->steps}};
  return j;
}

/// FNV-1a 64 of the canonical resolved configuration, as 16 hex digits.
inline std::string config_hash(const RunConfig& cfg) {
  const std::string text = resolved_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rodwave
