#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tccs/scenario.hpp"

namespace tccs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedConfig {
  ScenarioConfig scenario;
  nlohmann::ordered_json resolved;           // fully resolved values, defaults applied
  std::vector<std::string> applied_defaults; // dotted keys that fell back to defaults
};

namespace cfgdetail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& known,
                           const std::string& scope) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError("unknown config key: " + (scope.empty() ? "" : scope + ".") + it.key());
}

template <typename T>
T get_or_default(const json& obj, const std::string& scope, const std::string& key, T def,
                 std::vector<std::string>& applied) {
  if (obj.contains(key)) {
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("bad type for config key: " + (scope.empty() ? "" : scope + ".") + key);
    }
  }
  applied.push_back(scope.empty() ? key : scope + "." + key);
  return def;
}

inline std::string resolve_path(const std::string& p, const std::filesystem::path& base_dir) {
  if (p.empty()) return p;
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return fp.string();
  return (base_dir / fp).lexically_normal().string();
}

}  // namespace cfgdetail

// Applies a dotted `key=value` override onto a JSON tree, e.g.
// "control.f_s_hz=2000". Values parse as JSON when possible, else as strings.
inline void apply_override(nlohmann::ordered_json& root, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must have the form key=value: " + kv);
  const std::string key = kv.substr(0, eq);
  const std::string raw = kv.substr(eq + 1);
  nlohmann::ordered_json value;
  try {
    value = nlohmann::ordered_json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;
  }
  nlohmann::ordered_json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("bad override key: " + key);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

inline LoadedConfig parse_scenario_config(const nlohmann::ordered_json& j,
                                          const std::filesystem::path& base_dir) {
  using cfgdetail::get_or_default;
  using cfgdetail::reject_unknown;
  using cfgdetail::resolve_path;

  LoadedConfig out;
  ScenarioConfig& cfg = out.scenario;
  auto& applied = out.applied_defaults;

  reject_unknown(j, {"flow", "window", "rotor", "drivetrain", "control", "acoustics",
                     "distances_m", "species_path", "exposure", "dt_s", "settle_skip_s", "seed"},
                 "");

  // flow
  if (!j.contains("flow")) throw ConfigError("config requires a 'flow' section");
  {
    const auto& jf = j.at("flow");
    reject_unknown(jf, {"path", "synth"}, "flow");
    if (jf.contains("path") == jf.contains("synth"))
      throw ConfigError("flow must have exactly one of 'path' or 'synth'");
    if (jf.contains("path")) {
      cfg.flow.path = resolve_path(jf.at("path").get<std::string>(), base_dir);
    } else {
      const auto& js = jf.at("synth");
      reject_unknown(js, {"u_mean_mps", "u_amp_mps", "ti", "dt_s", "duration_s"}, "flow.synth");
      SynthFlowSpec s;
      s.u_mean = get_or_default(js, "flow.synth", "u_mean_mps", 2.0, applied);
      s.u_amp = get_or_default(js, "flow.synth", "u_amp_mps", 0.0, applied);
      s.ti = get_or_default(js, "flow.synth", "ti", kDefaultTurbulenceIntensity, applied);
      s.dt = get_or_default(js, "flow.synth", "dt_s", 1.0, applied);
      s.duration = get_or_default(js, "flow.synth", "duration_s", 40.0, applied);
      cfg.flow.synth = s;
    }
  }

  if (j.contains("window")) {
    const auto& jw = j.at("window");
    reject_unknown(jw, {"t0_s", "t1_s"}, "window");
    if (!jw.contains("t0_s") || !jw.contains("t1_s"))
      throw ConfigError("window requires t0_s and t1_s");
    cfg.window_bounds = {jw.at("t0_s").get<double>(), jw.at("t1_s").get<double>()};
  }

  {
    nlohmann::ordered_json jr = j.contains("rotor") ? j.at("rotor") : nlohmann::ordered_json::object();
    reject_unknown(jr, {"diameter_m", "rho_kg_m3", "cp_curve", "lambda_opt", "cp_max",
                        "allow_beyond_betz"},
                   "rotor");
    cfg.rotor.diameter = get_or_default(jr, "rotor", "diameter_m", 3.6, applied);
    cfg.rotor.rho = get_or_default(jr, "rotor", "rho_kg_m3", 1025.0, applied);
    cfg.rotor.lambda_opt = get_or_default(jr, "rotor", "lambda_opt", 4.0, applied);
    cfg.rotor.cp_max = get_or_default(jr, "rotor", "cp_max", 0.45, applied);
    cfg.rotor.allow_beyond_betz = get_or_default(jr, "rotor", "allow_beyond_betz", false, applied);
    if (jr.contains("cp_curve")) {
      for (const auto& node : jr.at("cp_curve")) {
        if (!node.is_array() || node.size() != 2)
          throw ConfigError("rotor.cp_curve entries must be [lambda, cp] pairs");
        cfg.rotor.cp_curve.emplace_back(node[0].get<double>(), node[1].get<double>());
      }
    } else {
      cfg.rotor.cp_curve = default_cp_curve();
      applied.push_back("rotor.cp_curve");
    }
  }

  {
    nlohmann::ordered_json jd =
        j.contains("drivetrain") ? j.at("drivetrain") : nlohmann::ordered_json::object();
    reject_unknown(jd, {"kind", "gear_ratio", "gear_stages", "inertia_kg_m2", "rated_power_w"},
                   "drivetrain");
    const std::string kind = get_or_default<std::string>(jd, "drivetrain", "kind", "geared", applied);
    if (kind == "geared") cfg.drivetrain.kind = DrivetrainKind::geared;
    else if (kind == "direct") cfg.drivetrain.kind = DrivetrainKind::direct;
    else throw ConfigError("drivetrain.kind must be 'geared' or 'direct'");
    const double default_ratio = cfg.drivetrain.kind == DrivetrainKind::direct ? 1.0 : 2.0;
    cfg.drivetrain.gear_ratio = get_or_default(jd, "drivetrain", "gear_ratio", default_ratio, applied);
    cfg.drivetrain.gear_stages = get_or_default(jd, "drivetrain", "gear_stages", 1, applied);
    cfg.drivetrain.inertia = get_or_default(jd, "drivetrain", "inertia_kg_m2", 1000.0, applied);
    cfg.drivetrain.rated_power = get_or_default(jd, "drivetrain", "rated_power_w", 1.5e5, applied);
  }

  {
    nlohmann::ordered_json jc =
        j.contains("control") ? j.at("control") : nlohmann::ordered_json::object();
    reject_unknown(jc, {"kopt_factor", "f_s_hz", "ripple_gain"}, "control");
    cfg.control.kopt_factor = get_or_default(jc, "control", "kopt_factor", 1.0, applied);
    cfg.control.f_s = get_or_default(jc, "control", "f_s_hz", 2000.0, applied);
    cfg.control.ripple_gain = get_or_default(jc, "control", "ripple_gain", 2.0, applied);
  }

  {
    nlohmann::ordered_json ja =
        j.contains("acoustics") ? j.at("acoustics") : nlohmann::ordered_json::object();
    reject_unknown(ja, {"sound_speed_mps", "blade_count", "chord_m", "lambda1_m", "mu", "f_corr",
                        "a_s", "f_lo_hz", "f_hi_hz", "gear_rpm_shaft"},
                   "acoustics");
    auto& tp = cfg.acoustics.turbulence;
    tp.sound_speed = get_or_default(ja, "acoustics", "sound_speed_mps", 1500.0, applied);
    tp.blade_count = get_or_default(ja, "acoustics", "blade_count", 3, applied);
    tp.chord = get_or_default(ja, "acoustics", "chord_m", 1.0, applied);
    tp.lambda1 = get_or_default(ja, "acoustics", "lambda1_m", 2.0, applied);
    tp.mu = get_or_default(ja, "acoustics", "mu", 1.0, applied);
    tp.f_corr = get_or_default(ja, "acoustics", "f_corr", 1.0, applied);
    tp.a_s = get_or_default(ja, "acoustics", "a_s", kCalibratedAs, applied);
    tp.f_lo = get_or_default(ja, "acoustics", "f_lo_hz", 10.0, applied);
    tp.f_hi = get_or_default(ja, "acoustics", "f_hi_hz", 10000.0, applied);
    const std::string shaft =
        get_or_default<std::string>(ja, "acoustics", "gear_rpm_shaft", "hss", applied);
    if (shaft == "hss") cfg.acoustics.gear_rpm_shaft = GearRpmShaft::hss;
    else if (shaft == "rotor") cfg.acoustics.gear_rpm_shaft = GearRpmShaft::rotor;
    else throw ConfigError("acoustics.gear_rpm_shaft must be 'hss' or 'rotor'");
  }

  if (j.contains("distances_m")) {
    cfg.distances.clear();
    for (const auto& d : j.at("distances_m")) cfg.distances.push_back(d.get<double>());
  } else {
    applied.push_back("distances_m");
  }

  if (j.contains("species_path"))
    cfg.species_path = resolve_path(j.at("species_path").get<std::string>(), base_dir);

  {
    nlohmann::ordered_json je =
        j.contains("exposure") ? j.at("exposure") : nlohmann::ordered_json::object();
    reject_unknown(je, {"t_exposure_s"}, "exposure");
    cfg.exposure.t_exposure =
        get_or_default(je, "exposure", "t_exposure_s", kDefaultExposureS, applied);
  }

  cfg.dt = get_or_default(j, "", "dt_s", 0.01, applied);
  cfg.settle_skip = get_or_default(j, "", "settle_skip_s", 25.0, applied);
  cfg.seed = get_or_default<long>(j, "", "seed", 0, applied);

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }

  // Echo the fully resolved configuration for reproducibility.
  nlohmann::ordered_json r;
  if (cfg.flow.synth) {
    r["flow"]["synth"] = {{"u_mean_mps", cfg.flow.synth->u_mean},
                          {"u_amp_mps", cfg.flow.synth->u_amp},
                          {"ti", cfg.flow.synth->ti},
                          {"dt_s", cfg.flow.synth->dt},
                          {"duration_s", cfg.flow.synth->duration}};
  } else {
    r["flow"]["path"] = cfg.flow.path;
  }
  if (cfg.window_bounds)
    r["window"] = {{"t0_s", cfg.window_bounds->first}, {"t1_s", cfg.window_bounds->second}};
  r["rotor"] = {{"diameter_m", cfg.rotor.diameter},
                {"rho_kg_m3", cfg.rotor.rho},
                {"lambda_opt", cfg.rotor.lambda_opt},
                {"cp_max", cfg.rotor.cp_max},
                {"allow_beyond_betz", cfg.rotor.allow_beyond_betz}};
  for (const auto& [lam, cp] : cfg.rotor.cp_curve)
    r["rotor"]["cp_curve"].push_back({lam, cp});
  r["drivetrain"] = {
      {"kind", cfg.drivetrain.kind == DrivetrainKind::geared ? "geared" : "direct"},
      {"gear_ratio", cfg.drivetrain.gear_ratio},
      {"gear_stages", cfg.drivetrain.gear_stages},
      {"inertia_kg_m2", cfg.drivetrain.inertia},
      {"rated_power_w", cfg.drivetrain.rated_power}};
  r["control"] = {{"kopt_factor", cfg.control.kopt_factor},
                  {"f_s_hz", cfg.control.f_s},
                  {"ripple_gain", cfg.control.ripple_gain}};
  const auto& tp = cfg.acoustics.turbulence;
  r["acoustics"] = {
      {"sound_speed_mps", tp.sound_speed},
      {"blade_count", tp.blade_count},
      {"chord_m", tp.chord},
      {"lambda1_m", tp.lambda1},
      {"mu", tp.mu},
      {"f_corr", tp.f_corr},
      {"a_s", tp.a_s},
      {"f_lo_hz", tp.f_lo},
      {"f_hi_hz", tp.f_hi},
      {"gear_rpm_shaft", cfg.acoustics.gear_rpm_shaft == GearRpmShaft::hss ? "hss" : "rotor"}};
  r["distances_m"] = cfg.distances;
  if (!cfg.species_path.empty()) r["species_path"] = cfg.species_path;
  r["exposure"] = {{"t_exposure_s", cfg.exposure.t_exposure}};
  r["dt_s"] = cfg.dt;
  r["settle_skip_s"] = cfg.settle_skip;
  r["seed"] = cfg.seed;
  out.resolved = std::move(r);
  return out;
}

inline LoadedConfig load_config(const std::string& path,
                                const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  for (const std::string& kv : overrides) apply_override(j, kv);
  return parse_scenario_config(j, std::filesystem::path(path).parent_path());
}

}  // namespace tccs
