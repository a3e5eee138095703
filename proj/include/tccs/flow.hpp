#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tccs {

// Principal lunar semi-diurnal (M2) period, seconds.
inline constexpr double kM2PeriodS = 44712.0;

inline constexpr double kDefaultTurbulenceIntensity = 0.10;

struct FlowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FlowSample {
  double t = 0.0;   // s
  double u = 0.0;   // m/s
  double ti = 0.0;  // turbulence intensity, fraction of u
};

// Mean-square turbulence velocity fluctuation u'^2 = (ti*u)^2, m^2/s^2.
inline double turbulence_msv(const FlowSample& s) {
  const double up = s.ti * s.u;
  return up * up;
}

struct FlowSeries {
  std::vector<FlowSample> samples;
  double dt = 0.0;  // uniform spacing, s

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  double t_begin() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }

  void validate() const {
    if (samples.empty()) throw FlowError("flow series is empty");
    if (!(dt > 0.0)) throw FlowError("flow series dt must be positive");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const FlowSample& s = samples[i];
      if (!std::isfinite(s.t)) throw FlowError("non-finite time in flow series");
      if (s.u < 0.0) throw FlowError("negative flow speed at t=" + std::to_string(s.t));
      if (s.ti < 0.0 || s.ti > 1.0)
        throw FlowError("turbulence intensity out of [0,1] at t=" + std::to_string(s.t));
      if (i > 0) {
        const double step = s.t - samples[i - 1].t;
        if (step <= 0.0) throw FlowError("non-increasing time at t=" + std::to_string(s.t));
        if (std::fabs(step - dt) > 1e-6)
          throw FlowError("non-uniform sampling at t=" + std::to_string(s.t));
      }
    }
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_double(const std::string& s, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FlowError("line " + std::to_string(line_no) + ": bad " + what + " value '" + s + "'");
  }
}

}  // namespace detail

// Reads `t_s,u_mps,ti` CSV. The ti column may be omitted; the default
// intensity is applied then.
inline FlowSeries load_flow_csv(const std::string& path,
                                double default_ti = kDefaultTurbulenceIntensity) {
  std::ifstream in(path);
  if (!in) throw FlowError("cannot open flow file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw FlowError("empty flow file: " + path);
  auto header = detail::split_csv_line(line);
  bool has_ti;
  if (header.size() == 3 && header[0] == "t_s" && header[1] == "u_mps" && header[2] == "ti") {
    has_ti = true;
  } else if (header.size() == 2 && header[0] == "t_s" && header[1] == "u_mps") {
    has_ti = false;
  } else {
    throw FlowError("bad flow header, expected t_s,u_mps[,ti]: " + line);
  }

  FlowSeries out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != header.size())
      throw FlowError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    FlowSample s;
    s.t = detail::parse_double(f[0], line_no, "time");
    s.u = detail::parse_double(f[1], line_no, "speed");
    s.ti = has_ti ? detail::parse_double(f[2], line_no, "ti") : default_ti;
    if (s.u < 0.0) throw FlowError("line " + std::to_string(line_no) + ": negative speed");
    out.samples.push_back(s);
  }
  if (out.samples.empty()) throw FlowError("flow file has no samples: " + path);
  out.dt = out.samples.size() > 1 ? out.samples[1].t - out.samples[0].t : 1.0;
  out.validate();
  return out;
}

inline void write_flow_csv(const FlowSeries& series, std::ostream& os) {
  os << "t_s,u_mps,ti\n";
  char buf[96];
  for (const FlowSample& s : series.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.t, s.u, s.ti);
    os << buf;
  }
}

inline void write_flow_csv(const FlowSeries& series, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw FlowError("cannot write flow file: " + path);
  write_flow_csv(series, os);
}

// U(t) = u_mean + u_amp*sin(2*pi*t/T_M2), constant turbulence intensity.
inline FlowSeries synthesize_semidiurnal(double u_mean, double u_amp, double ti, double dt,
                                         double duration) {
  if (u_amp < 0.0 || u_mean < u_amp)
    throw FlowError("semidiurnal synthesis requires u_mean >= u_amp >= 0");
  if (!(dt > 0.0)) throw FlowError("dt must be positive");
  if (duration < dt) throw FlowError("duration must be at least dt");

  FlowSeries out;
  out.dt = dt;
  const auto n = static_cast<std::size_t>(std::floor(duration / dt)) + 1;
  out.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    out.samples.push_back({t, u_mean + u_amp * std::sin(2.0 * M_PI * t / kM2PeriodS), ti});
  }
  out.validate();
  return out;
}

// Sub-series with t0 <= t <= t1; spacing preserved.
inline FlowSeries window(const FlowSeries& series, double t0, double t1) {
  if (!(t0 < t1)) throw FlowError("window requires t0 < t1");
  if (series.empty()) throw FlowError("window on empty series");
  if (t0 < series.t_begin() - 1e-9 || t1 > series.t_end() + 1e-9)
    throw FlowError("window bounds outside series span");

  FlowSeries out;
  out.dt = series.dt;
  for (const FlowSample& s : series.samples)
    if (s.t >= t0 - 1e-9 && s.t <= t1 + 1e-9) out.samples.push_back(s);
  if (out.samples.empty()) throw FlowError("window selects no samples");
  out.validate();
  return out;
}

}  // namespace tccs
