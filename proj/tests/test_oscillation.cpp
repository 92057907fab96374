#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fhl/errors.hpp"
#include "fhl/oscillation.hpp"

using namespace fhl;

namespace {

Trajectory holder_trajectory(double beta, double t0, double t1, int frames) {
  const Grid g = Grid::space(1, 256, 4.0);
  const Field u = Field::sample(g, 2, [beta](auto x, std::span<double> o) {
    o[0] = std::min(std::pow(std::abs(x[0]), beta), 0.99);
    o[1] = 0.0;
  });
  Trajectory tr;
  for (int i = 0; i <= frames; ++i) {
    tr.times.push_back(t0 + (t1 - t0) * i / frames);
    tr.frames.push_back(u);
  }
  return tr;
}

}  // namespace

TEST_CASE("interval cascade") {
  const auto ic = interval_cascade(8);
  CHECK(ic.intervals[0].a == 0.0);
  CHECK(ic.intervals[0].b == 0.5);
  CHECK(ic.intervals[1].a == 0.25);
  CHECK(ic.intervals[1].b == 0.375);
  CHECK(ic.t_star == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (int k = 1; k <= 8; ++k) {
    CHECK(ic.intervals[k].b - ic.intervals[k].a == std::ldexp(1.0, -2 * k - 1));
    CHECK(ic.intervals[k].a >= ic.intervals[k - 1].a);
    CHECK(ic.intervals[k].b <= ic.intervals[k - 1].b);
  }
  CHECK(ic.intervals[8].a == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK_THROWS_AS(interval_cascade(-1), ConfigError);
}

TEST_CASE("fit of exact log-linear data") {
  std::vector<double> m;
  for (int k = 0; k < 8; ++k) m.push_back(0.7 * std::pow(0.5, 0.3 * k));
  CHECK(*fit_alpha(m, 0.5) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(std::abs(*fit_alpha(std::vector<double>(8, 0.2), 0.5)) < 1e-14);
  CHECK_FALSE(fit_alpha(std::vector<double>(8, 0.0), 0.5).has_value());
  CHECK_FALSE(fit_alpha({0.5, 0.4, 0.3}, 0.5).has_value());
}

TEST_CASE("constant trajectory is degenerate") {
  const Grid g = Grid::space(1, 64, 4.0);
  Trajectory tr;
  for (int i = 0; i <= 64; ++i) {
    tr.times.push_back(i / 128.0);
    tr.frames.push_back(Field::scalar(g, [](auto) { return 0.4; }));
  }
  const auto rep = oscillation_cascade(tr, 0.5, 1.0, CascadeMode::local);
  CHECK(rep.degenerate);
  CHECK_FALSE(rep.alpha_fit.has_value());
  for (const auto& lv : rep.levels) CHECK(lv.M_k == 0.0);
  CHECK_FALSE(holder_fit(rep, 1.0, 0.4).al_ok);
}

TEST_CASE("synthetic holder field recovers its exponent") {
  const auto local = oscillation_cascade(holder_trajectory(0.5, 0.0, 0.5, 4096), 0.5, 1.0, CascadeMode::local);
  const auto frac = oscillation_cascade(holder_trajectory(0.5, -1.0, 0.0, 256), 0.5, 0.5, CascadeMode::fractional);
  REQUIRE(local.alpha_fit.has_value());
  REQUIRE(frac.alpha_fit.has_value());
  CHECK(std::abs(*local.alpha_fit - 0.5) <= 0.05);
  CHECK(std::abs(*frac.alpha_fit - 0.5) <= 0.05);
  CHECK(frac.update_law_ok);
}

TEST_CASE("levels are nested, contained and monotone") {
  const auto rep = oscillation_cascade(holder_trajectory(0.5, -1.0, 0.0, 256), 0.5, 0.5, CascadeMode::fractional);
  for (std::size_t k = 1; k < rep.levels.size(); ++k) {
    CHECK(rep.levels[k].radius < rep.levels[k - 1].radius);
    CHECK(rep.levels[k].M_k <= rep.levels[k - 1].M_k);
  }
  CHECK(rep.delta_witness > 0.0);
  for (const auto& lv : rep.levels) CHECK(lv.M_k <= rep.M * std::pow(1.0 - rep.delta_witness, lv.k) + 1e-12);
}

TEST_CASE("cascade stops at the grid resolution") {
  const auto rep = oscillation_cascade(holder_trajectory(0.5, -1.0, 0.0, 256), 0.5, 0.5, CascadeMode::fractional);
  CHECK(rep.max_level == 6);
  CHECK(rep.levels.back().radius >= 4.0 / 256);
}

TEST_CASE("uncovered level zero and oversize data are rejected") {
  CHECK_THROWS_AS(oscillation_cascade(holder_trajectory(0.5, 0.0, 0.2, 64), 0.5, 1.0, CascadeMode::local), ConfigError);
  const Grid g = Grid::space(1, 64, 4.0);
  Trajectory big;
  for (int i = 0; i <= 8; ++i) {
    big.times.push_back(i / 16.0);
    big.frames.push_back(Field::scalar(g, [](auto) { return 0.995; }));
  }
  CHECK_THROWS_AS(oscillation_cascade(big, 0.5, 1.0, CascadeMode::local), HypothesisError);
}

TEST_CASE("holder flags follow the measured delta") {
  CascadeReport rep;
  rep.r = 0.5;
  rep.s = 0.5;
  rep.alpha_fit = 0.4;
  rep.delta_witness = 0.5;
  const auto hf = holder_fit(rep, 2.0, 0.5);
  CHECK(hf.al_bound == doctest::Approx(1.0));
  CHECK(hf.al_ok);
  CHECK_FALSE(hf.r_admissible);
  CHECK(holder_fit(rep, 0.1, 0.5).r_admissible);
}

TEST_CASE("cascade csv has one row per level and a summary row") {
  const auto rep = oscillation_cascade(holder_trajectory(0.5, -1.0, 0.0, 256), 0.5, 0.5, CascadeMode::fractional);
  const auto path = std::filesystem::temp_directory_path() / "fhl_cascade.csv";
  write_cascade_csv(path, rep);
  std::ifstream in(path);
  std::string line;
  std::size_t rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == rep.levels.size() + 2);
  CHECK(last.rfind("summary,", 0) == 0);
  std::filesystem::remove(path);
}
