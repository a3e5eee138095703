#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tccs/turbine.hpp"

namespace tccs {

struct AcousticsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A level that may be silent. Silent sources never enter dB arithmetic.
using SourceLevel = std::optional<double>;

// Empirical turbulence-noise scale, fixed so that the default plant at the
// 2 m/s settled reference point (ti = 0.10) emits 149 dB re 1 uPa at 1 m.
inline constexpr double kCalibratedAs = 1.221489e10;

enum class GearRpmShaft { hss, rotor };

struct TurbulenceNoiseParams {
  double sound_speed = 1500.0;  // m/s, in water
  int blade_count = 3;
  double chord = 1.0;           // representative blade chord C_T, m
  double lambda1 = 2.0;         // axial turbulence length scale, m
  double mu = 1.0;              // length scale parameter
  double f_corr = 1.0;          // correlation factor
  double a_s = 1.0;             // empirical calibration factor
  double f_lo = 10.0;           // integration band edges, Hz
  double f_hi = 10000.0;

  void validate() const {
    if (!(sound_speed > 0.0) || blade_count < 1 || !(chord > 0.0) || !(lambda1 > 0.0) ||
        !(mu > 0.0) || !(f_corr > 0.0) || !(a_s > 0.0))
      throw AcousticsError("turbulence noise parameters must be positive");
    if (!(f_lo > 0.0) || !(f_lo < f_hi))
      throw AcousticsError("band edges require 0 < f_lo < f_hi");
  }
};

struct SourceLevels {
  SourceLevel turb;  // dB re 1 uPa @ 1 m
  SourceLevel gear;  // absent for direct drive
  SourceLevel gen;
};

struct ReceivedSpl {
  double r = 0.0;  // m
  SourceLevel turb;
  SourceLevel gear;
  SourceLevel gen;
  SourceLevel total;
};

// Squared Sears gust-response magnitude, high-frequency approximation.
inline double sears_sq(double sigma) {
  if (sigma < 0.0) throw AcousticsError("sears_sq requires sigma >= 0");
  return 1.0 / (1.0 + 2.0 * M_PI * sigma);
}

// Third-octave band centers covering [f_lo, f_hi] (geometric centers of
// 2^(1/3)-spaced edges, last band clipped at f_hi).
inline std::vector<double> third_octave_centers(double f_lo, double f_hi) {
  std::vector<double> centers;
  const double ratio = std::pow(2.0, 1.0 / 3.0);
  double lo = f_lo;
  while (lo < f_hi) {
    const double hi = std::min(lo * ratio, f_hi);
    centers.push_back(std::sqrt(lo * hi));
    lo *= ratio;
  }
  return centers;
}

// Broadband mean-square pressure from inflow-turbulence interaction, uPa^2.
// Spectrum per band: phi_p(r, 2*pi*f) = A_s * F_corr * B * rho^2 * U_T^3 * C_T
//   * Lambda_1 * u'^2 / (8*pi*r^2*c*(1+mu^2)) * |S_e(pi*f*C_T/U_T)|^2,
// with band contribution 1/2 * phi_p * omega at the band center.
inline double turbulence_msp(double r, double omega_rot, double u, double u2,
                             const TurbulenceNoiseParams& p, const RotorConfig& rotor) {
  if (r < 1.0) throw AcousticsError("receiver distance must be >= 1 m");
  if (omega_rot < 0.0) throw AcousticsError("rotor speed must be >= 0");
  (void)u;
  const double tip_speed = omega_rot * rotor.radius();
  if (tip_speed <= 0.0 || u2 <= 0.0) return 0.0;

  const double base = p.a_s * p.f_corr * static_cast<double>(p.blade_count) * rotor.rho *
                      rotor.rho * tip_speed * tip_speed * tip_speed * p.chord * p.lambda1 * u2 /
                      (8.0 * M_PI * r * r * p.sound_speed * (1.0 + p.mu * p.mu));
  double msp = 0.0;
  for (double fc : third_octave_centers(p.f_lo, p.f_hi)) {
    const double phi = base * sears_sq(M_PI * fc * p.chord / tip_speed);
    msp += 0.5 * phi * (2.0 * M_PI * fc);
  }
  return msp;
}

// SPL of the turbulence source at the 1 m reference, dB re 1 uPa.
inline SourceLevel turbulence_source_level(const OperatingState& state,
                                           const TurbulenceNoiseParams& p,
                                           const RotorConfig& rotor) {
  const double msp = turbulence_msp(1.0, state.omega, state.u, state.u2, p, rotor);
  if (msp <= 0.0) return std::nullopt;
  return 10.0 * std::log10(msp);
}

// In-air gearbox level (Bruce): 86 + 3 log10(rpm_s) + 4 log10(kW) + 10 log10(S).
inline double gearbox_source_level(double rpm_s, double p_kw, int stages) {
  if (!(rpm_s > 0.0) || !(p_kw > 0.0) || stages < 1)
    throw AcousticsError("gearbox level requires positive rpm, kW and stages >= 1");
  return 86.0 + 3.0 * std::log10(rpm_s) + 4.0 * std::log10(p_kw) +
         10.0 * std::log10(static_cast<double>(stages));
}

// In-air generator level: 80 + 10 log10(MW) + 6.6 log10(rpm).
inline double generator_source_level(double p_mw, double rpm) {
  if (!(p_mw > 0.0) || !(rpm > 0.0))
    throw AcousticsError("generator level requires positive MW and rpm");
  return 80.0 + 10.0 * std::log10(p_mw) + 6.6 * std::log10(rpm);
}

// In-air (re 20 uPa) level to underwater (re 1 uPa): reference shift
// 20 log10(20) plus impedance shift 10 log10(1.5e6 / 415).
inline double air_to_water(double sl_air) {
  static const double offset =
      20.0 * std::log10(20.0) + 10.0 * std::log10(1.5e6 / 415.0);
  return sl_air + offset;
}

// Spherical spreading from the 1 m reference.
inline double propagate(double sl, double r) {
  if (r < 1.0) throw AcousticsError("propagation distance must be >= 1 m");
  return sl - 20.0 * std::log10(r);
}

inline SourceLevel propagate(SourceLevel sl, double r) {
  if (!sl) return std::nullopt;
  return propagate(*sl, r);
}

// Incoherent power summation; silent entries are skipped.
inline SourceLevel combine_incoherent(const std::vector<SourceLevel>& levels) {
  if (levels.empty()) throw AcousticsError("combine_incoherent on empty input");
  double power = 0.0;
  bool any = false;
  for (const SourceLevel& l : levels) {
    if (!l) continue;
    power += std::pow(10.0, *l / 10.0);
    any = true;
  }
  if (!any) return std::nullopt;
  return 10.0 * std::log10(power);
}

struct AcousticsConfig {
  TurbulenceNoiseParams turbulence;
  GearRpmShaft gear_rpm_shaft = GearRpmShaft::hss;
};

// Per-source levels at the 1 m reference for one operating state.
inline SourceLevels source_levels(const OperatingState& state, const RotorConfig& rotor,
                                  const DrivetrainConfig& drivetrain,
                                  const ControlConfig& control, const AcousticsConfig& ac) {
  SourceLevels out;
  out.turb = turbulence_source_level(state, ac.turbulence, rotor);

  const double p_kw = state.p_mech / 1e3;
  if (drivetrain.kind == DrivetrainKind::geared) {
    const double rpm_s =
        ac.gear_rpm_shaft == GearRpmShaft::hss ? state.rpm_hss : state.rpm_rotor;
    if (rpm_s > 0.0 && p_kw > 0.0)
      out.gear = air_to_water(gearbox_source_level(rpm_s, p_kw, drivetrain.gear_stages));
  }

  const double rpm_gen = state.rpm_hss * (1.0 + switching_ripple_rms(control));
  if (rpm_gen > 0.0 && p_kw > 0.0)
    out.gen = air_to_water(generator_source_level(state.p_mech / 1e6, rpm_gen));
  return out;
}

inline ReceivedSpl received_spl(const OperatingState& state, double r, const RotorConfig& rotor,
                                const DrivetrainConfig& drivetrain, const ControlConfig& control,
                                const AcousticsConfig& ac) {
  if (r < 1.0) throw AcousticsError("receiver distance must be >= 1 m");
  const SourceLevels sl = source_levels(state, rotor, drivetrain, control, ac);
  ReceivedSpl out;
  out.r = r;
  out.turb = propagate(sl.turb, r);
  out.gear = propagate(sl.gear, r);
  out.gen = propagate(sl.gen, r);
  out.total = combine_incoherent({out.turb, out.gear, out.gen});
  return out;
}

}  // namespace tccs
