#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tccs/flow.hpp"

namespace tccs {

inline constexpr double kBetzLimit = 0.593;
inline constexpr double kRadPerSecToRpm = 60.0 / (2.0 * M_PI);

struct TurbineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RotorConfig {
  double diameter = 3.6;  // m
  double rho = 1025.0;    // kg/m^3
  std::vector<std::pair<double, double>> cp_curve;  // (lambda, Cp), lambda increasing
  double lambda_opt = 4.0;
  double cp_max = 0.45;
  bool allow_beyond_betz = false;

  double radius() const { return 0.5 * diameter; }
  double area() const { return M_PI * radius() * radius(); }

  void validate() const {
    if (!(diameter > 0.0)) throw TurbineError("rotor diameter must be positive");
    if (!(rho > 0.0)) throw TurbineError("fluid density must be positive");
    if (cp_curve.size() < 2) throw TurbineError("cp_curve needs at least two nodes");
    double best = -1.0, best_lambda = 0.0;
    for (std::size_t i = 0; i < cp_curve.size(); ++i) {
      const auto& [lam, cp] = cp_curve[i];
      if (cp < 0.0) throw TurbineError("cp_curve value below zero");
      if (!allow_beyond_betz && cp >= kBetzLimit)
        throw TurbineError("cp_curve value at or above the Betz bound 0.593");
      if (i > 0 && lam <= cp_curve[i - 1].first)
        throw TurbineError("cp_curve lambda values must be strictly increasing");
      if (cp > best) { best = cp; best_lambda = lam; }
    }
    if (std::fabs(best - cp_max) > 1e-9 || std::fabs(best_lambda - lambda_opt) > 1e-9)
      throw TurbineError("cp_max/lambda_opt do not match the cp_curve peak");
  }
};

// Default 11-node curve, peak (4, 0.45), zero at both ends.
inline std::vector<std::pair<double, double>> default_cp_curve() {
  return {{0.0, 0.0},  {0.8, 0.07}, {1.6, 0.16}, {2.4, 0.28}, {3.2, 0.404}, {4.0, 0.45},
          {4.8, 0.40}, {5.6, 0.32}, {6.4, 0.21}, {7.2, 0.10}, {8.0, 0.0}};
}

enum class DrivetrainKind { geared, direct };

struct DrivetrainConfig {
  DrivetrainKind kind = DrivetrainKind::geared;
  double gear_ratio = 2.0;    // G, high-speed shaft rpm / rotor rpm
  int gear_stages = 1;        // S in the gearbox level formula
  double inertia = 1000.0;    // rotor-side total J, kg*m^2
  double rated_power = 1.5e5; // W

  void validate() const {
    if (!(inertia > 0.0)) throw TurbineError("drivetrain inertia must be positive");
    if (!(rated_power > 0.0)) throw TurbineError("rated power must be positive");
    if (kind == DrivetrainKind::direct) {
      if (std::fabs(gear_ratio - 1.0) > 1e-12)
        throw TurbineError("direct drive requires gear_ratio = 1");
    } else {
      if (gear_ratio < 1.0) throw TurbineError("gear_ratio must be >= 1");
      if (gear_stages < 1) throw TurbineError("gear_stages must be >= 1");
    }
  }
};

struct ControlConfig {
  double kopt_factor = 1.0;  // multiplier on the nominal MPPT gain
  double f_s = 2000.0;       // converter switching frequency, Hz
  double ripple_gain = 2.0;  // k_sw in r_rms = k_sw / f_s

  void validate() const {
    if (!(kopt_factor > 0.0)) throw TurbineError("kopt_factor must be positive");
    if (kopt_factor < 0.8 - 1e-12 || kopt_factor > 1.2 + 1e-12)
      throw TurbineError("kopt_factor outside the supported range [0.8, 1.2]");
    if (!(f_s > 0.0)) throw TurbineError("switching frequency must be positive");
    if (ripple_gain < 0.0) throw TurbineError("ripple_gain must be >= 0");
  }
};

struct OperatingState {
  double t = 0.0;             // s
  double u = 0.0;             // m/s
  double omega = 0.0;         // rad/s
  double lambda = 0.0;
  double cp = 0.0;
  double torque_rotor = 0.0;  // N*m
  double torque_gen = 0.0;    // N*m, rotor side
  double p_mech = 0.0;        // W
  double rpm_rotor = 0.0;
  double rpm_hss = 0.0;
  double u2 = 0.0;            // turbulence mean-square velocity, m^2/s^2
};

// P = 1/2 * rho * A * U^3
inline double kinetic_power(double rho, double area, double u) {
  return 0.5 * rho * area * u * u * u;
}

// lambda = omega * D / (2 U); caller must handle standstill flow.
inline double tip_speed_ratio(double omega, double diameter, double u) {
  if (u <= 0.0) throw TurbineError("tip speed ratio undefined at zero flow");
  return omega * diameter / (2.0 * u);
}

// Piecewise-linear Cp(lambda); zero outside the curve domain.
inline double power_coefficient(double lambda,
                                const std::vector<std::pair<double, double>>& curve) {
  if (curve.empty() || lambda < curve.front().first || lambda > curve.back().first) return 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (lambda <= curve[i].first) {
      const auto& [l0, c0] = curve[i - 1];
      const auto& [l1, c1] = curve[i];
      const double w = (lambda - l0) / (l1 - l0);
      return c0 + w * (c1 - c0);
    }
  }
  return curve.back().second;
}

namespace detail {
inline constexpr double kOmegaEps = 1e-3;   // rad/s, startup-torque floor
inline constexpr double kLambdaEps = 0.1;
}  // namespace detail

// T = Cp(lambda) * P_kin / omega, with a startup floor near omega = 0.
inline double rotor_torque(double u, double omega, const RotorConfig& rotor) {
  if (u <= 0.0) return 0.0;
  const double pk = kinetic_power(rotor.rho, rotor.area(), u);
  if (omega < detail::kOmegaEps) {
    const double cp0 = power_coefficient(detail::kLambdaEps, rotor.cp_curve);
    const double omega0 = detail::kLambdaEps * 2.0 * u / rotor.diameter;
    return omega0 > 0.0 ? cp0 * pk / omega0 : 0.0;
  }
  const double lambda = tip_speed_ratio(omega, rotor.diameter, u);
  return power_coefficient(lambda, rotor.cp_curve) * pk / omega;
}

// Nominal optimal-torque gain K = 1/2 * rho * A * R^3 * cp_max / lambda_opt^3.
inline double mppt_nominal_gain(const RotorConfig& rotor) {
  const double r = rotor.radius();
  return 0.5 * rotor.rho * rotor.area() * r * r * r * rotor.cp_max /
         (rotor.lambda_opt * rotor.lambda_opt * rotor.lambda_opt);
}

// T_ref = kopt_factor * K_nom * omega^2
inline double mppt_reference_torque(double omega, const RotorConfig& rotor,
                                    const ControlConfig& control) {
  return control.kopt_factor * mppt_nominal_gain(rotor) * omega * omega;
}

// Relative generator-speed ripple attributable to converter switching.
inline double switching_ripple_rms(const ControlConfig& control) {
  if (!(control.f_s > 0.0)) throw TurbineError("switching frequency must be positive");
  return control.ripple_gain / control.f_s;
}

inline OperatingState make_state(double t, double u, double ti, double omega,
                                 const RotorConfig& rotor, const DrivetrainConfig& drivetrain,
                                 const ControlConfig& control) {
  OperatingState s;
  s.t = t;
  s.u = u;
  s.omega = omega;
  s.lambda = u > 0.0 ? tip_speed_ratio(omega, rotor.diameter, u) : 0.0;
  s.cp = power_coefficient(s.lambda, rotor.cp_curve);
  s.torque_rotor = rotor_torque(u, omega, rotor);
  s.torque_gen = mppt_reference_torque(omega, rotor, control);
  s.p_mech = s.torque_rotor * omega;
  s.rpm_rotor = omega * kRadPerSecToRpm;
  s.rpm_hss = s.rpm_rotor * drivetrain.gear_ratio;
  s.u2 = turbulence_msv({t, u, ti});
  return s;
}

// Explicit Euler on the one-mass model: J * domega/dt = T_rotor - T_gen.
inline OperatingState step_dynamics(const OperatingState& state, double u_next, double ti_next,
                                    double dt, const RotorConfig& rotor,
                                    const DrivetrainConfig& drivetrain,
                                    const ControlConfig& control) {
  if (!(dt > 0.0)) throw TurbineError("dt must be positive");
  double omega = state.omega + dt * (state.torque_rotor - state.torque_gen) / drivetrain.inertia;
  omega = std::max(omega, 0.0);
  OperatingState next =
      make_state(state.t + dt, u_next, 0.0, omega, rotor, drivetrain, control);
  next.u2 = u_next > 0.0 ? (ti_next * u_next) * (ti_next * u_next) : 0.0;
  if (!std::isfinite(next.omega) || !std::isfinite(next.torque_rotor) ||
      !std::isfinite(next.torque_gen))
    throw TurbineError("non-finite state at t=" + std::to_string(next.t));
  return next;
}

// Tip speed ratio of the closed-loop equilibrium Cp(l)/l^3 = f*cp_max/lambda_opt^3,
// searched on the rising branch below and falling branch above the peak.
inline double equilibrium_lambda(const RotorConfig& rotor, double kopt_factor) {
  const double target = kopt_factor * rotor.cp_max /
                        (rotor.lambda_opt * rotor.lambda_opt * rotor.lambda_opt);
  auto g = [&](double lam) {
    return power_coefficient(lam, rotor.cp_curve) - target * lam * lam * lam;
  };
  // Bracket the crossing nearest the peak.
  double lo = rotor.lambda_opt, hi = rotor.lambda_opt;
  if (kopt_factor >= 1.0) {
    hi = rotor.lambda_opt;
    lo = 0.25 * rotor.lambda_opt;
    while (g(lo) < 0.0 && lo > 1e-3) lo *= 0.5;
  } else {
    lo = rotor.lambda_opt;
    hi = rotor.cp_curve.back().first;
  }
  if (g(lo) < 0.0 || g(hi) > 0.0) {
    // Degenerate bracket (factor == 1 lands exactly on the peak).
    return rotor.lambda_opt;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) >= 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double equilibrium_omega(double u, const RotorConfig& rotor, double kopt_factor) {
  if (u <= 0.0) return 0.0;
  return equilibrium_lambda(rotor, kopt_factor) * u / rotor.radius();
}

// Deterministic trajectory under zero-order-hold flow. The simulation step dt
// must divide the flow spacing; initial omega defaults to the closed-loop
// equilibrium for the first sample.
inline std::vector<OperatingState> simulate(const FlowSeries& flow, const RotorConfig& rotor,
                                            const DrivetrainConfig& drivetrain,
                                            const ControlConfig& control, double dt,
                                            double initial_omega = -1.0) {
  rotor.validate();
  drivetrain.validate();
  control.validate();
  flow.validate();
  if (!(dt > 0.0)) throw TurbineError("dt must be positive");
  const double steps_per_sample_f = flow.dt / dt;
  const auto steps_per_sample = static_cast<std::size_t>(std::llround(steps_per_sample_f));
  if (steps_per_sample < 1 ||
      std::fabs(steps_per_sample_f - static_cast<double>(steps_per_sample)) > 1e-6)
    throw TurbineError("simulation dt must divide the flow sampling interval");

  const FlowSample& first = flow.samples.front();
  double omega0 = initial_omega >= 0.0 ? initial_omega
                                       : equilibrium_omega(first.u, rotor, control.kopt_factor);

  std::vector<OperatingState> states;
  states.reserve((flow.size() - 1) * steps_per_sample + 1);
  states.push_back(make_state(first.t, first.u, first.ti, omega0, rotor, drivetrain, control));
  for (std::size_t i = 0; i + 1 < flow.size(); ++i) {
    const FlowSample& hold = flow.samples[i];
    for (std::size_t k = 0; k < steps_per_sample; ++k) {
      // Hold flow constant across the sample interval.
      const bool last = (k + 1 == steps_per_sample);
      const FlowSample& next = last ? flow.samples[i + 1] : hold;
      states.push_back(
          step_dynamics(states.back(), next.u, next.ti, dt, rotor, drivetrain, control));
    }
  }
  return states;
}

}  // namespace tccs
