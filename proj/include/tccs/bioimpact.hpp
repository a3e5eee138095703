#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tccs/acoustics.hpp"
#include "tccs/flow.hpp"

namespace tccs {

struct BioimpactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultExposureS = 28800.0;  // 8 h daily exposure

enum class SpeciesGroup { mammal, fish };

struct SpeciesProfile {
  std::string name;
  SpeciesGroup group = SpeciesGroup::mammal;
  double gtv = 0.0;  // generic threshold value, dB re 1 uPa
  std::vector<std::pair<double, double>> audiogram;  // (Hz, dB re 1 uPa)

  void validate() const {
    if (name.empty()) throw BioimpactError("species name must not be empty");
    if (!std::isfinite(gtv)) throw BioimpactError("species GTV must be finite");
    double min_thr = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < audiogram.size(); ++i) {
      if (i > 0 && audiogram[i].first <= audiogram[i - 1].first)
        throw BioimpactError("audiogram frequencies must be strictly increasing: " + name);
      min_thr = std::min(min_thr, audiogram[i].second);
    }
    if (!audiogram.empty() && gtv > min_thr + 1e-9)
      throw BioimpactError("GTV above minimum audiogram threshold: " + name);
  }
};

struct ExposureCriteria {
  double t_exposure = kDefaultExposureS;  // s

  void validate() const {
    if (!(t_exposure > 0.0)) throw BioimpactError("exposure duration must be positive");
  }
};

struct ImpactResult {
  std::string species;
  double tts_level = 0.0;      // dB
  double pts_level = 0.0;      // dB
  double audible_radius = 0.0; // m
  double tts_radius = 0.0;     // m
  double pts_radius = 0.0;     // m
};

// TTS = GTV + 75 - 10 log10(T / 28800)
inline double tts_threshold(double gtv, double t) {
  if (!(t > 0.0)) throw BioimpactError("exposure duration must be positive");
  return gtv + 75.0 - 10.0 * std::log10(t / kDefaultExposureS);
}

// PTS = GTV + 95 - 10 log10(T / 28800)
inline double pts_threshold(double gtv, double t) {
  if (!(t > 0.0)) throw BioimpactError("exposure duration must be positive");
  return gtv + 95.0 - 10.0 * std::log10(t / kDefaultExposureS);
}

inline bool is_audible(double spl, double gtv) { return spl > gtv; }

// Range at which a source of the given total level falls to the threshold,
// inverting spherical spreading. 0 when the threshold is never exceeded.
inline double impact_radius(double source_total, double threshold) {
  if (threshold > source_total) return 0.0;
  return std::max(1.0, std::pow(10.0, (source_total - threshold) / 20.0));
}

inline std::vector<ImpactResult> assess(double source_total,
                                        const std::vector<SpeciesProfile>& species,
                                        const ExposureCriteria& exposure) {
  if (species.empty()) throw BioimpactError("no species profiles to assess");
  exposure.validate();
  std::vector<ImpactResult> out;
  out.reserve(species.size());
  for (const SpeciesProfile& sp : species) {
    sp.validate();
    ImpactResult r;
    r.species = sp.name;
    r.tts_level = tts_threshold(sp.gtv, exposure.t_exposure);
    r.pts_level = pts_threshold(sp.gtv, exposure.t_exposure);
    r.audible_radius = impact_radius(source_total, sp.gtv);
    r.tts_radius = impact_radius(source_total, r.tts_level);
    r.pts_radius = impact_radius(source_total, r.pts_level);
    out.push_back(std::move(r));
  }
  return out;
}

// Species CSV: name,group,gtv_db,audiogram with audiogram a semicolon-
// separated list of freq_hz:threshold_db pairs (may be empty).
inline std::vector<SpeciesProfile> load_species_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BioimpactError("cannot open species file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw BioimpactError("empty species file: " + path);
  {
    auto header = detail::split_csv_line(line);
    if (header.size() != 4 || header[0] != "name" || header[1] != "group" ||
        header[2] != "gtv_db" || header[3] != "audiogram")
      throw BioimpactError("bad species header, expected name,group,gtv_db,audiogram");
  }
  std::vector<SpeciesProfile> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 4)
      throw BioimpactError("species line " + std::to_string(line_no) + ": expected 4 fields");
    SpeciesProfile sp;
    sp.name = f[0];
    if (f[1] == "mammal") sp.group = SpeciesGroup::mammal;
    else if (f[1] == "fish") sp.group = SpeciesGroup::fish;
    else throw BioimpactError("species line " + std::to_string(line_no) + ": unknown group '" + f[1] + "'");
    sp.gtv = detail::parse_double(f[2], line_no, "gtv");
    if (!f[3].empty()) {
      std::stringstream ss(f[3]);
      std::string pair;
      while (std::getline(ss, pair, ';')) {
        const auto colon = pair.find(':');
        if (colon == std::string::npos)
          throw BioimpactError("species line " + std::to_string(line_no) + ": bad audiogram pair '" + pair + "'");
        sp.audiogram.emplace_back(detail::parse_double(pair.substr(0, colon), line_no, "frequency"),
                                  detail::parse_double(pair.substr(colon + 1), line_no, "threshold"));
      }
    }
    sp.validate();
    out.push_back(std::move(sp));
  }
  if (out.empty()) throw BioimpactError("species file has no profiles: " + path);
  return out;
}

}  // namespace tccs
