#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tccs/flow.hpp"

using namespace tccs;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream os(p);
  os << content;
  return p;
}

}  // namespace

TEST_CASE("load_flow_csv parses rows in order") {
  const auto p = write_temp("flow_ok.csv", "t_s,u_mps,ti\n0,1.5,0.1\n1,1.6,0.1\n");
  const FlowSeries s = load_flow_csv(p.string());
  REQUIRE(s.size() == 2);
  CHECK(s.dt == doctest::Approx(1.0));
  CHECK(s.samples[0].u == doctest::Approx(1.5));
  CHECK(s.samples[1].u == doctest::Approx(1.6));
}

TEST_CASE("load_flow_csv applies the default ti when the column is absent") {
  const auto p = write_temp("flow_noti.csv", "t_s,u_mps\n0,1.5\n1,1.6\n");
  const FlowSeries s = load_flow_csv(p.string());
  CHECK(s.samples[0].ti == doctest::Approx(0.10));
}

TEST_CASE("load_flow_csv rejects non-uniform spacing") {
  const auto p = write_temp("flow_gap.csv", "t_s,u_mps,ti\n0,1.5,0.1\n2,1.6,0.1\n3,1.7,0.1\n");
  CHECK_THROWS_AS(load_flow_csv(p.string()), FlowError);
}

TEST_CASE("load_flow_csv rejects negative speed with a line number") {
  const auto p = write_temp("flow_neg.csv", "t_s,u_mps,ti\n0,-1.0,0.1\n");
  CHECK_THROWS_WITH_AS(load_flow_csv(p.string()), doctest::Contains("line 2"), FlowError);
}

TEST_CASE("load_flow_csv reports missing files") {
  CHECK_THROWS_AS(load_flow_csv("/nonexistent/flow.csv"), FlowError);
}

TEST_CASE("semidiurnal synthesis") {
  SUBCASE("zero amplitude is constant") {
    const FlowSeries s = synthesize_semidiurnal(2.0, 0.0, 0.1, 1.0, 10.0);
    REQUIRE(s.size() == 11);
    for (const auto& smp : s.samples) CHECK(smp.u == doctest::Approx(2.0));
  }
  SUBCASE("peak at the quarter period") {
    const FlowSeries s = synthesize_semidiurnal(2.0, 0.5, 0.1, 1.0, 44712.0);
    CHECK(s.samples[11178].u == doctest::Approx(2.5).epsilon(1e-6));
  }
  SUBCASE("amplitude above mean is rejected") {
    CHECK_THROWS_AS(synthesize_semidiurnal(1.0, 1.5, 0.1, 1.0, 10.0), FlowError);
  }
}

TEST_CASE("windowing") {
  const FlowSeries s = synthesize_semidiurnal(2.0, 0.5, 0.1, 1.0, 10000.0);
  SUBCASE("the 7300-7340 s interval has 41 samples") {
    const FlowSeries w = window(s, 7300.0, 7340.0);
    CHECK(w.size() == 41);
    CHECK(w.dt == doctest::Approx(1.0));
    CHECK(w.t_begin() == doctest::Approx(7300.0));
  }
  SUBCASE("degenerate bounds rejected") {
    CHECK_THROWS_AS(window(s, 7300.0, 7300.0), FlowError);
  }
  SUBCASE("out-of-range bounds rejected") {
    CHECK_THROWS_AS(window(s, -5.0, 10.0), FlowError);
  }
}

TEST_CASE("turbulence mean-square velocity") {
  CHECK(turbulence_msv({0.0, 2.0, 0.1}) == doctest::Approx(0.04));
  CHECK(turbulence_msv({0.0, 2.0, 0.0}) == doctest::Approx(0.0));
  CHECK(turbulence_msv({0.0, 1.93, 0.1}) == doctest::Approx(0.037249));
}

TEST_CASE("csv round trip preserves values") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> du(0.0, 3.0), dti(0.0, 0.3);
  FlowSeries s;
  s.dt = 0.5;
  for (int i = 0; i < 50; ++i) s.samples.push_back({0.5 * i, du(rng), dti(rng)});
  const auto p = fs::temp_directory_path() / "flow_rt.csv";
  write_flow_csv(s, p.string());
  const FlowSeries r = load_flow_csv(p.string());
  REQUIRE(r.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(r.samples[i].t == doctest::Approx(s.samples[i].t).epsilon(1e-9));
    CHECK(r.samples[i].u == doctest::Approx(s.samples[i].u).epsilon(1e-9));
    CHECK(r.samples[i].ti == doctest::Approx(s.samples[i].ti).epsilon(1e-9));
  }
}

TEST_CASE("nested windows compose") {
  const FlowSeries s = synthesize_semidiurnal(2.0, 0.5, 0.1, 1.0, 1000.0);
  const FlowSeries outer = window(s, 100.0, 900.0);
  const FlowSeries a = window(outer, 200.0, 400.0);
  const FlowSeries b = window(s, 200.0, 400.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.samples[i].t == b.samples[i].t);
    CHECK(a.samples[i].u == b.samples[i].u);
  }
}

TEST_CASE("synthesis stays within mean +/- amplitude") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dm(0.5, 3.0);
  for (int k = 0; k < 20; ++k) {
    const double mean = dm(rng);
    const double amp = mean * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const FlowSeries s = synthesize_semidiurnal(mean, amp, 0.1, 60.0, 90000.0);
    for (const auto& smp : s.samples) {
      CHECK(smp.u >= mean - amp - 1e-12);
      CHECK(smp.u <= mean + amp + 1e-12);
    }
  }
}
