#pragma once

// Run configuration: one JSON document with optional per-command sections.
// Every object is checked for unknown keys and every value against the
// module preconditions before a command starts computing.
//
// {
//   "vdd": 1.65,
//   "output_dir": "out",
//   "emit_svg": false,
//   "devices": {"preset": "baseline" | "discrete", "nmos": {...}, "pmos": {...}},
//   "readout": {"i_ref", "mirror_gain", "ambiguity_margin", "r_limit_up", "r_limit_dn"},
//   "sweep":   {"grid": <grid>, "configs": [<inverter>, ...]},
//   "surface": {"m_a", "m_b", "m_c", "grid_a": <grid>, "grid_b": <grid>, "nor": false},
//   "energy":  {"c_out", "l_grid": [...], "dt_fraction",
//               "models": [{"label", "r1", "r2", "v_out_1"} | {"label", "inverter", "v_in", "v_out_1"}]},
//   "digitize": {"inverter": <inverter>, "grid": <grid>, "i_ref_scan": [...]},
//   "texel":   {"dataset", "r0", "r1": [4 values], "r_load", "mirror_gain",
//               "target_class" | "program_targets", "v_trig", "gain", "offset", "sample_offset"}
// }
//
// <grid>     = [v, ...] | {"start", "stop", "points"} | {"strip": true, "coarse", "fine", "lo", "hi"}
// <inverter> = {"label", "r_up", "r_dn"} | {"label", "r_a", "r_b", "r_c", "r_d"}, plus an
//              optional "devices" object overriding the top-level one.
// MOSFET overrides accept v_th, k_prime, w, l, lambda, g_min.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memgate/dcsolver.hpp"
#include "memgate/energy.hpp"
#include "memgate/devices.hpp"
#include "memgate/errors.hpp"
#include "memgate/netlist.hpp"
#include "memgate/readout.hpp"

namespace memgate {

using json = nlohmann::json;

struct DevicePair {
  MosfetParams nmos = default_nmos();
  MosfetParams pmos = default_pmos();
};

struct InverterSpec {
  std::string label;
  bool general = false;  // four-memristor topology
  double r_up = 0.0, r_dn = 0.0;
  double r_a = 0.0, r_b = 0.0, r_c = 0.0, r_d = 0.0;
  DevicePair devices;

  GateCircuit build(double vdd) const {
    if (general)
      return build_general_inverter_4r(devices.pmos, devices.nmos, make_memristor(r_a),
                                       make_memristor(r_b), make_memristor(r_c), make_memristor(r_d),
                                       vdd);
    return build_inverter_2t2r(devices.pmos, devices.nmos, make_memristor(r_up), make_memristor(r_dn),
                               vdd);
  }
};

struct SweepSection {
  std::vector<double> grid;
  std::vector<InverterSpec> configs;
};

struct SurfaceSection {
  double m_a = 0.35e6, m_b = 50e3, m_c = 0.4e6;
  std::vector<double> grid_a, grid_b;
  bool nor = false;
};

struct EnergyModelSpec {
  std::string label;
  std::optional<InverterSpec> inverter;
  double v_in = 0.0;
  double r1 = 0.0, r2 = 0.0;
  double v_out_1 = 0.0;
};

struct EnergySection {
  double c_out = kDefaultOutputCapacitance;
  std::vector<double> l_grid{1.0, 2.0, 4.0, 8.0};
  double dt_fraction = 1e-4;
  std::vector<EnergyModelSpec> models;
};

struct DigitizeSection {
  InverterSpec inverter;
  std::vector<double> grid;
  std::vector<double> i_ref_scan;
};

struct TexelSection {
  std::filesystem::path dataset;
  double r0 = 4e3;
  std::vector<double> r1{19.5e3, 14.8e3, 12.7e3, 10.6e3};
  double r_load = 300e3;
  double mirror_gain = 0.5;
  std::optional<int> target_class;
  std::vector<double> program_targets;
  double v_trig = 1.5;
  double gain = 0.1;
  double offset = 0.66;
  std::size_t sample_offset = 7;
};

struct RunConfig {
  double vdd = 1.65;
  std::filesystem::path output_dir = "out";
  bool emit_svg = false;
  DevicePair devices;
  ReadoutParams readout = default_readout();
  std::optional<SweepSection> sweep;
  std::optional<SurfaceSection> surface;
  std::optional<EnergySection> energy;
  std::optional<DigitizeSection> digitize;
  std::optional<TexelSection> texel;
};

namespace cfg {

inline void check_keys(const json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

inline double number(const json& j, const std::string& key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline double number_or(const json& j, const std::string& key, double def, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : def;
}

inline double positive(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  const double v = number(j, key, where);
  if (!(v > 0.0)) throw ConfigError(where + "." + key + ": must be > 0");
  return v;
}

inline std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(where + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline std::vector<double> grid(const json& j, const std::string& where, double vdd) {
  std::vector<double> g;
  if (j.is_array()) {
    g = numbers(j, where);
  } else if (j.is_object() && j.contains("strip")) {
    check_keys(j, where, {"strip", "coarse", "fine", "lo", "hi"});
    g = strip_protocol_grid(vdd, number_or(j, "coarse", 0.1, where), number_or(j, "fine", 0.05, where),
                            number_or(j, "lo", 0.5, where), number_or(j, "hi", 0.8, where));
  } else {
    check_keys(j, where, {"start", "stop", "points"});
    const auto& p = j.at("points");
    if (!p.is_number_integer() || p.get<long>() < 2) throw ConfigError(where + ".points: need an integer >= 2");
    g = linear_grid(number(j, "start", where), number(j, "stop", where), p.get<std::size_t>());
  }
  if (g.empty()) throw ConfigError(where + ": empty grid");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) throw ConfigError(where + ": grid must be strictly increasing");
  if (g.front() < 0.0 || g.back() > vdd) throw ConfigError(where + ": grid must lie within [0, vdd]");
  return g;
}

inline MosfetParams mosfet(const json& j, MosfetParams p, const std::string& where) {
  check_keys(j, where, {"v_th", "k_prime", "w", "l", "lambda", "g_min"});
  p.v_th = number_or(j, "v_th", p.v_th, where);
  p.k_prime = number_or(j, "k_prime", p.k_prime, where);
  p.w = number_or(j, "w", p.w, where);
  p.l = number_or(j, "l", p.l, where);
  p.lambda = number_or(j, "lambda", p.lambda, where);
  p.g_min = number_or(j, "g_min", p.g_min, where);
  try {
    p.validate();
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return p;
}

inline DevicePair devices(const json& j, DevicePair base, const std::string& where) {
  check_keys(j, where, {"preset", "nmos", "pmos"});
  if (j.contains("preset")) {
    const auto& p = j.at("preset");
    if (p == "baseline") base = DevicePair{};
    else if (p == "discrete") base = {discrete_nmos(), discrete_pmos()};
    else throw ConfigError(where + ".preset: expected \"baseline\" or \"discrete\"");
  }
  if (j.contains("nmos")) base.nmos = mosfet(j.at("nmos"), base.nmos, where + ".nmos");
  if (j.contains("pmos")) base.pmos = mosfet(j.at("pmos"), base.pmos, where + ".pmos");
  return base;
}

inline double resistance(const json& j, const std::string& key, const std::string& where) {
  const double r = positive(j, key, where);
  if (r < kResistanceFloor) throw ConfigError(where + "." + key + ": below the 1 ohm floor");
  return r;
}

inline std::string label(const json& j, const std::string& where) {
  if (!j.contains("label") || !j.at("label").is_string())
    throw ConfigError(where + ": missing string 'label'");
  const auto s = j.at("label").get<std::string>();
  if (s.empty() || s.find_first_not_of(
                       "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
                       std::string::npos)
    throw ConfigError(where + ".label: use letters, digits, '_' or '-'");
  return s;
}

inline InverterSpec inverter(const json& j, const DevicePair& dev, const std::string& where) {
  check_keys(j, where, {"label", "r_up", "r_dn", "r_a", "r_b", "r_c", "r_d", "devices"});
  InverterSpec s;
  s.label = j.contains("label") ? label(j, where) : "inverter";
  s.devices = j.contains("devices") ? devices(j.at("devices"), dev, where + ".devices") : dev;
  s.general = j.contains("r_a");
  if (s.general) {
    if (j.contains("r_up") || j.contains("r_dn"))
      throw ConfigError(where + ": give either r_up/r_dn or r_a..r_d");
    s.r_a = resistance(j, "r_a", where);
    s.r_b = resistance(j, "r_b", where);
    s.r_c = resistance(j, "r_c", where);
    s.r_d = resistance(j, "r_d", where);
  } else {
    s.r_up = resistance(j, "r_up", where);
    s.r_dn = resistance(j, "r_dn", where);
  }
  return s;
}

inline bool boolean(const json& j, const std::string& key, bool def, const std::string& where) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_boolean()) throw ConfigError(where + "." + key + ": expected true/false");
  return j.at(key).get<bool>();
}

}  // namespace cfg

namespace cfg {

inline RunConfig parse(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "config", {"vdd", "output_dir", "emit_svg", "devices", "readout", "sweep", "surface",
                           "energy", "digitize", "texel"});
  RunConfig c;
  c.vdd = j.contains("vdd") ? positive(j, "vdd", "config") : 1.65;
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) throw ConfigError("config.output_dir: expected a string");
    c.output_dir = j.at("output_dir").get<std::string>();
  }
  c.emit_svg = boolean(j, "emit_svg", false, "config");
  if (j.contains("devices")) c.devices = devices(j.at("devices"), c.devices, "devices");

  c.readout = default_readout(c.vdd);
  if (j.contains("readout")) {
    const auto& r = j.at("readout");
    check_keys(r, "readout", {"i_ref", "mirror_gain", "ambiguity_margin", "r_limit_up", "r_limit_dn"});
    c.readout.i_ref = number_or(r, "i_ref", c.readout.i_ref, "readout");
    c.readout.mirror_gain = number_or(r, "mirror_gain", c.readout.mirror_gain, "readout");
    c.readout.ambiguity_margin = number_or(r, "ambiguity_margin", c.readout.ambiguity_margin, "readout");
    c.readout.r_limit_up = number_or(r, "r_limit_up", c.readout.r_limit_up, "readout");
    c.readout.r_limit_dn = number_or(r, "r_limit_dn", c.readout.r_limit_dn, "readout");
  }
  try {
    c.readout.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("readout: ") + e.what());
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, "sweep", {"grid", "configs"});
    SweepSection sec;
    sec.grid = grid(s.at("grid"), "sweep.grid", c.vdd);
    if (!s.contains("configs") || !s.at("configs").is_array() || s.at("configs").empty())
      throw ConfigError("sweep.configs: need at least one inverter");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < s.at("configs").size(); ++i) {
      auto spec = inverter(s.at("configs")[i], c.devices, "sweep.configs[" + std::to_string(i) + "]");
      if (!seen.insert(spec.label).second) throw ConfigError("sweep.configs: duplicate label " + spec.label);
      sec.configs.push_back(std::move(spec));
    }
    c.sweep = std::move(sec);
  }

  if (j.contains("surface")) {
    const auto& s = j.at("surface");
    check_keys(s, "surface", {"m_a", "m_b", "m_c", "grid_a", "grid_b", "nor"});
    SurfaceSection sec;
    if (s.contains("m_a")) sec.m_a = resistance(s, "m_a", "surface");
    if (s.contains("m_b")) sec.m_b = resistance(s, "m_b", "surface");
    if (s.contains("m_c")) sec.m_c = resistance(s, "m_c", "surface");
    sec.grid_a = s.contains("grid_a") ? grid(s.at("grid_a"), "surface.grid_a", c.vdd)
                                      : strip_protocol_grid(c.vdd);
    sec.grid_b = s.contains("grid_b") ? grid(s.at("grid_b"), "surface.grid_b", c.vdd)
                                      : linear_grid(0.0, c.vdd, 34);
    sec.nor = boolean(s, "nor", false, "surface");
    c.surface = std::move(sec);
  }

  if (j.contains("energy")) {
    const auto& s = j.at("energy");
    check_keys(s, "energy", {"c_out", "l_grid", "dt_fraction", "models"});
    EnergySection sec;
    if (s.contains("c_out")) sec.c_out = positive(s, "c_out", "energy");
    if (s.contains("l_grid")) sec.l_grid = numbers(s.at("l_grid"), "energy.l_grid");
    if (sec.l_grid.empty()) throw ConfigError("energy.l_grid: empty grid");
    for (double l : sec.l_grid)
      if (!(l >= 0.0)) throw ConfigError("energy.l_grid: values must be >= 0");
    if (s.contains("dt_fraction")) sec.dt_fraction = positive(s, "dt_fraction", "energy");
    if (sec.dt_fraction > 1e-3) throw ConfigError("energy.dt_fraction: must be <= 1e-3");
    if (!s.contains("models") || !s.at("models").is_array() || s.at("models").empty())
      throw ConfigError("energy.models: need at least one model");
    for (std::size_t i = 0; i < s.at("models").size(); ++i) {
      const auto& m = s.at("models")[i];
      const auto where = "energy.models[" + std::to_string(i) + "]";
      check_keys(m, where, {"label", "r1", "r2", "inverter", "v_in", "v_out_1"});
      EnergyModelSpec spec;
      spec.label = label(m, where);
      spec.v_out_1 = number_or(m, "v_out_1", 0.0, where);
      if (spec.v_out_1 < 0.0 || spec.v_out_1 > c.vdd) throw ConfigError(where + ".v_out_1: outside [0, vdd]");
      if (m.contains("inverter")) {
        if (m.contains("r1") || m.contains("r2")) throw ConfigError(where + ": give r1/r2 or inverter, not both");
        spec.inverter = inverter(m.at("inverter"), c.devices, where + ".inverter");
        spec.v_in = number(m, "v_in", where);
        if (spec.v_in < 0.0 || spec.v_in > c.vdd) throw ConfigError(where + ".v_in: outside [0, vdd]");
      } else {
        spec.r1 = positive(m, "r1", where);
        spec.r2 = positive(m, "r2", where);
      }
      sec.models.push_back(std::move(spec));
    }
    c.energy = std::move(sec);
  }

  if (j.contains("digitize")) {
    const auto& s = j.at("digitize");
    check_keys(s, "digitize", {"inverter", "grid", "i_ref_scan"});
    DigitizeSection sec;
    sec.inverter = inverter(s.at("inverter"), c.devices, "digitize.inverter");
    sec.grid = grid(s.at("grid"), "digitize.grid", c.vdd);
    if (s.contains("i_ref_scan")) sec.i_ref_scan = numbers(s.at("i_ref_scan"), "digitize.i_ref_scan");
    for (double i : sec.i_ref_scan)
      if (!(i > 0.0)) throw ConfigError("digitize.i_ref_scan: values must be > 0");
    c.digitize = std::move(sec);
  }

  if (j.contains("texel")) {
    const auto& s = j.at("texel");
    check_keys(s, "texel", {"dataset", "r0", "r1", "r_load", "mirror_gain", "target_class",
                            "program_targets", "v_trig", "gain", "offset", "sample_offset"});
    TexelSection sec;
    if (!s.contains("dataset") || !s.at("dataset").is_string())
      throw ConfigError("texel.dataset: expected a path");
    sec.dataset = s.at("dataset").get<std::string>();
    if (sec.dataset.is_relative() && !base_dir.empty()) sec.dataset = base_dir / sec.dataset;
    if (s.contains("r0")) sec.r0 = resistance(s, "r0", "texel");
    if (s.contains("r1")) sec.r1 = numbers(s.at("r1"), "texel.r1");
    if (sec.r1.size() != 4) throw ConfigError("texel.r1: need four resistances");
    for (double r : sec.r1)
      if (!(r >= 1e3 && r <= 1e6)) throw ConfigError("texel.r1: values must lie in [1 kohm, 1 Mohm]");
    if (s.contains("r_load")) sec.r_load = positive(s, "r_load", "texel");
    if (s.contains("mirror_gain")) sec.mirror_gain = positive(s, "mirror_gain", "texel");
    if (s.contains("target_class") && s.contains("program_targets"))
      throw ConfigError("texel: give target_class or program_targets, not both");
    if (s.contains("target_class")) {
      if (!s.at("target_class").is_number_integer()) throw ConfigError("texel.target_class: expected an integer");
      sec.target_class = s.at("target_class").get<int>();
    }
    if (s.contains("program_targets")) {
      sec.program_targets = numbers(s.at("program_targets"), "texel.program_targets");
      if (sec.program_targets.size() != 4) throw ConfigError("texel.program_targets: need four voltages");
    }
    sec.v_trig = number_or(s, "v_trig", sec.v_trig, "texel");
    sec.gain = number_or(s, "gain", sec.gain, "texel");
    sec.offset = number_or(s, "offset", sec.offset, "texel");
    if (s.contains("sample_offset")) {
      const auto& o = s.at("sample_offset");
      if (!o.is_number_integer() || o.get<long>() < 0) throw ConfigError("texel.sample_offset: expected an integer >= 0");
      sec.sample_offset = o.get<std::size_t>();
    }
    c.texel = std::move(sec);
  }
  return c;
}

}  // namespace cfg

// `base_dir` anchors relative dataset paths (normally the config file's
// directory).
inline RunConfig parse_config(const json& j, const std::filesystem::path& base_dir = {}) {
  try {
    return cfg::parse(j, base_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(f, nullptr, true, false);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return parse_config(j, path.parent_path());
}

}  // namespace memgate
