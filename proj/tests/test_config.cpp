#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "tccs/config.hpp"

using namespace tccs;
namespace fs = std::filesystem;

namespace {

fs::path write_config(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream os(p);
  os << content;
  return p;
}

const std::string kMinimal = R"({"flow": {"synth": {"u_mean_mps": 2.0}}})";

}  // namespace

TEST_CASE("minimal config applies and reports documented defaults") {
  const auto p = write_config("cfg_min.json", kMinimal);
  const LoadedConfig lc = load_config(p.string());
  CHECK(lc.scenario.dt == doctest::Approx(0.01));
  CHECK(lc.scenario.rotor.diameter == doctest::Approx(3.6));
  CHECK(lc.scenario.control.f_s == doctest::Approx(2000.0));
  CHECK(lc.scenario.acoustics.turbulence.a_s == doctest::Approx(kCalibratedAs));
  CHECK(lc.scenario.exposure.t_exposure == doctest::Approx(28800.0));
  auto applied = lc.applied_defaults;
  CHECK(std::find(applied.begin(), applied.end(), "dt_s") != applied.end());
  CHECK(std::find(applied.begin(), applied.end(), "rotor.cp_curve") != applied.end());
  CHECK(std::find(applied.begin(), applied.end(), "control.kopt_factor") != applied.end());
  // the resolved echo is complete
  CHECK(lc.resolved.contains("rotor"));
  CHECK(lc.resolved.contains("acoustics"));
  CHECK(lc.resolved["dt_s"] == 0.01);
}

TEST_CASE("unknown keys are rejected, not ignored") {
  const auto p = write_config("cfg_unknown.json",
                              R"({"flow": {"synth": {}}, "rotr": {"diameter_m": 5}})");
  CHECK_THROWS_WITH_AS(load_config(p.string()), doctest::Contains("rotr"), ConfigError);
  const auto p2 = write_config("cfg_unknown2.json",
                               R"({"flow": {"synth": {"u_mean": 2.0}}})");
  CHECK_THROWS_WITH_AS(load_config(p2.string()), doctest::Contains("u_mean"), ConfigError);
}

TEST_CASE("invariant violations are named per field") {
  const auto p = write_config(
      "cfg_bad_kopt.json",
      R"({"flow": {"synth": {}}, "control": {"kopt_factor": 1.5}})");
  CHECK_THROWS_WITH_AS(load_config(p.string()), doctest::Contains("kopt_factor"), ConfigError);
}

TEST_CASE("overrides win over file values") {
  const auto p = write_config(
      "cfg_override.json",
      R"({"flow": {"synth": {}}, "control": {"f_s_hz": 1000}})");
  const LoadedConfig lc = load_config(p.string(), {"control.f_s_hz=2000"});
  CHECK(lc.scenario.control.f_s == doctest::Approx(2000.0));
  CHECK_THROWS_AS(load_config(p.string(), {"no_equals_sign"}), ConfigError);
  CHECK_THROWS_AS(load_config(p.string(), {"control.bogus=1"}), ConfigError);
}

TEST_CASE("flow requires exactly one source") {
  const auto p = write_config("cfg_noflow.json", R"({"dt_s": 0.01})");
  CHECK_THROWS_AS(load_config(p.string()), ConfigError);
  const auto p2 = write_config(
      "cfg_bothflow.json", R"({"flow": {"path": "x.csv", "synth": {}}})");
  CHECK_THROWS_AS(load_config(p2.string()), ConfigError);
}

TEST_CASE("relative paths resolve against the config directory") {
  const fs::path dir = fs::temp_directory_path() / "tccs_cfg_dir";
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "flow.csv");
    os << "t_s,u_mps,ti\n0,2.0,0.1\n1,2.0,0.1\n";
  }
  const fs::path p = dir / "cfg.json";
  {
    std::ofstream os(p);
    os << R"({"flow": {"path": "flow.csv"}})";
  }
  const LoadedConfig lc = load_config(p.string());
  CHECK(fs::path(lc.scenario.flow.path).is_absolute());
  CHECK_NOTHROW(lc.scenario.flow.load());
}

TEST_CASE("bundled baseline config loads and validates") {
  const LoadedConfig lc = load_config(std::string(TCCS_DATA_DIR) + "/baseline.json");
  CHECK(lc.scenario.window_bounds.has_value());
  CHECK(lc.scenario.distances == std::vector<double>{10.0, 50.0, 100.0});
  CHECK_FALSE(lc.scenario.species_path.empty());
}
