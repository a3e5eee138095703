#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "tccs/acoustics.hpp"
#include "tccs/bioimpact.hpp"
#include "tccs/flow.hpp"
#include "tccs/turbine.hpp"

namespace tccs {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SynthFlowSpec {
  double u_mean = 2.0;
  double u_amp = 0.0;
  double ti = kDefaultTurbulenceIntensity;
  double dt = 1.0;
  double duration = 40.0;
};

struct FlowSource {
  // Either a CSV path or a synthesis spec.
  std::string path;
  std::optional<SynthFlowSpec> synth;

  FlowSeries load() const {
    if (synth) return synthesize_semidiurnal(synth->u_mean, synth->u_amp, synth->ti, synth->dt,
                                             synth->duration);
    if (path.empty()) throw ScenarioError("no flow source configured");
    return load_flow_csv(path);
  }
};

struct ScenarioConfig {
  FlowSource flow;
  std::optional<std::pair<double, double>> window_bounds;  // (t0, t1), s
  RotorConfig rotor;
  DrivetrainConfig drivetrain;
  ControlConfig control;
  AcousticsConfig acoustics;
  std::vector<double> distances = {10.0, 50.0, 100.0};  // receiver ranges, m
  std::string species_path;
  ExposureCriteria exposure;
  double dt = 0.01;           // s
  double settle_skip = 25.0;  // s discarded before statistics
  long seed = 0;              // reserved for stochastic extensions

  void validate() const {
    rotor.validate();
    drivetrain.validate();
    control.validate();
    acoustics.turbulence.validate();
    exposure.validate();
    if (!(dt > 0.0)) throw ScenarioError("dt must be positive");
    if (settle_skip < 0.0) throw ScenarioError("settle_skip must be >= 0");
    if (distances.empty()) throw ScenarioError("at least one receiver distance required");
    for (double r : distances)
      if (r < 1.0) throw ScenarioError("receiver distances must be >= 1 m");
    if (window_bounds && !(window_bounds->first < window_bounds->second))
      throw ScenarioError("window requires t0 < t1");
  }
};

struct RunResult {
  std::vector<OperatingState> states;
  std::vector<std::vector<ReceivedSpl>> received;  // [timestep][distance]
  std::vector<double> distances;
  double energy = 0.0;        // J, integrated mechanical energy
  double spl_max_50m = std::numeric_limits<double>::quiet_NaN();  // dB, NaN if 50 m absent
  std::size_t max_spl_index = 0;  // timestep of the loudest total at distances[0]
  std::vector<ImpactResult> impacts;
};

inline RunResult run_scenario(const ScenarioConfig& cfg,
                              const std::vector<SpeciesProfile>* species = nullptr) {
  cfg.validate();
  FlowSeries flow = cfg.flow.load();
  if (cfg.window_bounds)
    flow = window(flow, cfg.window_bounds->first, cfg.window_bounds->second);

  RunResult out;
  out.distances = cfg.distances;
  out.states = simulate(flow, cfg.rotor, cfg.drivetrain, cfg.control, cfg.dt);

  out.received.reserve(out.states.size());
  double best_total = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.states.size(); ++i) {
    std::vector<ReceivedSpl> row;
    row.reserve(cfg.distances.size());
    for (double r : cfg.distances)
      row.push_back(
          received_spl(out.states[i], r, cfg.rotor, cfg.drivetrain, cfg.control, cfg.acoustics));
    if (row.front().total && *row.front().total > best_total) {
      best_total = *row.front().total;
      out.max_spl_index = i;
    }
    out.received.push_back(std::move(row));
  }

  // Trapezoid integral of mechanical power.
  for (std::size_t i = 1; i < out.states.size(); ++i)
    out.energy += 0.5 * (out.states[i - 1].p_mech + out.states[i].p_mech) * cfg.dt;

  for (std::size_t d = 0; d < cfg.distances.size(); ++d) {
    if (std::fabs(cfg.distances[d] - 50.0) < 1e-9) {
      double mx = -std::numeric_limits<double>::infinity();
      bool any = false;
      for (const auto& row : out.received)
        if (row[d].total) { mx = std::max(mx, *row[d].total); any = true; }
      if (any) out.spl_max_50m = mx;
    }
  }

  if (species && !species->empty()) {
    // Worst case: assess at the loudest timestep's combined 1 m source level.
    const OperatingState& worst = out.states[out.max_spl_index];
    const SourceLevels sl =
        source_levels(worst, cfg.rotor, cfg.drivetrain, cfg.control, cfg.acoustics);
    const SourceLevel total = combine_incoherent({sl.turb, sl.gear, sl.gen});
    const double total_db = total ? *total : -std::numeric_limits<double>::infinity();
    out.impacts = assess(total_db, *species, cfg.exposure);
  }
  return out;
}

enum class SweepParameter { f_s, kopt_factor, drivetrain_kind };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::kopt_factor;
  std::vector<double> values;  // for drivetrain_kind: 0 = geared, 1 = direct
};

struct SweepRow {
  double value = 0.0;
  double spl_max_50m = 0.0;
  double energy = 0.0;
  std::vector<ImpactResult> impacts;
};

inline ScenarioConfig apply_sweep_value(ScenarioConfig cfg, SweepParameter p, double v) {
  switch (p) {
    case SweepParameter::f_s:
      if (v < 1000.0 - 1e-9 || v > 3000.0 + 1e-9)
        throw ScenarioError("f_s sweep value outside [1000, 3000] Hz");
      cfg.control.f_s = v;
      break;
    case SweepParameter::kopt_factor:
      if (v < 0.8 - 1e-9 || v > 1.2 + 1e-9)
        throw ScenarioError("kopt_factor sweep value outside [0.8, 1.2]");
      cfg.control.kopt_factor = v;
      break;
    case SweepParameter::drivetrain_kind:
      if (v != 0.0 && v != 1.0)
        throw ScenarioError("drivetrain_kind sweep values must be 0 (geared) or 1 (direct)");
      if (v == 1.0) {
        cfg.drivetrain.kind = DrivetrainKind::direct;
        cfg.drivetrain.gear_ratio = 1.0;
      } else {
        cfg.drivetrain.kind = DrivetrainKind::geared;
      }
      break;
  }
  return cfg;
}

inline unsigned sweep_thread_cap() {
  if (const char* env = std::getenv("TCCS_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Rows are computed independently (possibly concurrently) and returned in
// value order regardless of completion order.
inline std::vector<SweepRow> sweep(const ScenarioConfig& base, const SweepSpec& spec,
                                   const std::vector<SpeciesProfile>* species = nullptr) {
  if (spec.values.empty()) throw ScenarioError("sweep needs at least one value");
  std::vector<double> values = spec.values;
  std::sort(values.begin(), values.end());

  const unsigned cap = sweep_thread_cap();
  std::vector<SweepRow> rows(values.size());
  std::vector<std::future<void>> pending;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto job = [&, i] {
      const ScenarioConfig cfg = apply_sweep_value(base, spec.parameter, values[i]);
      const RunResult res = run_scenario(cfg, species);
      rows[i] = {values[i], res.spl_max_50m, res.energy, res.impacts};
    };
    if (cap <= 1) {
      job();
    } else {
      if (pending.size() >= cap) {
        pending.front().get();
        pending.erase(pending.begin());
      }
      pending.push_back(std::async(std::launch::async, job));
    }
  }
  for (auto& f : pending) f.get();
  return rows;
}

inline double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ScenarioError("correlation inputs must have equal length");
  const std::size_t n = x.size();
  if (n < 3) throw ScenarioError("correlation needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw ScenarioError("correlation undefined for a constant series");
  return sxy / std::sqrt(sxx * syy);
}

struct CorrelationResult {
  double spl_vs_omega = 0.0;
  double spl_vs_u = 0.0;
  std::size_t samples = 0;
};

// Correlations of total SPL at the first configured distance against rotor
// speed and inflow speed, on the settled portion of the run.
inline CorrelationResult correlate(const RunResult& res, double settle_skip) {
  if (res.states.empty()) throw ScenarioError("empty run result");
  const double t_start = res.states.front().t + settle_skip;
  std::vector<double> spl, omega, u;
  for (std::size_t i = 0; i < res.states.size(); ++i) {
    if (res.states[i].t < t_start) continue;
    if (!res.received[i].front().total) continue;
    spl.push_back(*res.received[i].front().total);
    omega.push_back(res.states[i].omega);
    u.push_back(res.states[i].u);
  }
  CorrelationResult out;
  out.samples = spl.size();
  out.spl_vs_omega = pearson_correlation(spl, omega);
  out.spl_vs_u = pearson_correlation(spl, u);
  return out;
}

// Total SPL at range r for a constant-flow equilibrium run of the scenario.
inline double equilibrium_spl(const ScenarioConfig& base, double u, double r) {
  ScenarioConfig cfg = base;
  cfg.flow.path.clear();
  cfg.flow.synth = SynthFlowSpec{u, 0.0, cfg.flow.synth ? cfg.flow.synth->ti
                                                        : kDefaultTurbulenceIntensity,
                                 1.0, 20.0};
  cfg.window_bounds.reset();
  cfg.distances = {r};
  const RunResult res = run_scenario(cfg);
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& row : res.received)
    if (row.front().total) mx = std::max(mx, *row.front().total);
  return mx;
}

struct OnsetResult {
  bool found = false;
  double u_onset = 0.0;  // m/s
  double threshold = 0.0;
  double r = 0.0;
};

// Lowest flow speed at which the equilibrium total SPL at range r exceeds the
// species TTS level; bisection to 0.01 m/s over [0.5, 4.0].
inline OnsetResult tts_onset_speed(const ScenarioConfig& cfg, const SpeciesProfile& species,
                                   double r, const ExposureCriteria& exposure,
                                   double u_lo = 0.5, double u_hi = 4.0, double tol = 0.01) {
  OnsetResult out;
  out.threshold = tts_threshold(species.gtv, exposure.t_exposure);
  out.r = r;
  if (equilibrium_spl(cfg, u_hi, r) <= out.threshold) return out;  // never crossed
  if (equilibrium_spl(cfg, u_lo, r) > out.threshold) {
    out.found = true;
    out.u_onset = u_lo;
    return out;
  }
  while (u_hi - u_lo > tol) {
    const double mid = 0.5 * (u_lo + u_hi);
    if (equilibrium_spl(cfg, mid, r) > out.threshold) u_hi = mid; else u_lo = mid;
  }
  out.found = true;
  out.u_onset = 0.5 * (u_lo + u_hi);
  return out;
}

struct CompareResult {
  std::vector<double> distances;
  std::vector<double> delta_spl;      // b - a, dB, max total per distance
  double delta_energy_pct = 0.0;      // 100 * (b - a) / a
  std::vector<std::string> species;
  std::vector<double> delta_tts_radius;  // b - a, m
};

inline CompareResult compare(const RunResult& a, const RunResult& b) {
  if (a.distances != b.distances) throw ScenarioError("compare requires identical distances");
  if (a.impacts.size() != b.impacts.size())
    throw ScenarioError("compare requires identical species sets");
  CompareResult out;
  out.distances = a.distances;
  auto max_at = [](const RunResult& r, std::size_t d) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& row : r.received)
      if (row[d].total) mx = std::max(mx, *row[d].total);
    return mx;
  };
  for (std::size_t d = 0; d < a.distances.size(); ++d)
    out.delta_spl.push_back(max_at(b, d) - max_at(a, d));
  if (a.energy != 0.0) out.delta_energy_pct = 100.0 * (b.energy - a.energy) / a.energy;
  for (std::size_t i = 0; i < a.impacts.size(); ++i) {
    if (a.impacts[i].species != b.impacts[i].species)
      throw ScenarioError("compare requires identical species sets");
    out.species.push_back(a.impacts[i].species);
    out.delta_tts_radius.push_back(b.impacts[i].tts_radius - a.impacts[i].tts_radius);
  }
  return out;
}

}  // namespace tccs
