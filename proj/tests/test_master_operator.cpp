#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "fhl/errors.hpp"
#include "fhl/master_operator.hpp"
#include "fhl/spectral.hpp"

using namespace fhl;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const HsOptions kPeriodic{TimeMode::periodic, 0.0, History::zero};
const HsOptions kCausal{TimeMode::causal, 0.0, History::zero};

SpaceTimeField bump(const Grid& g) {
  return SpaceTimeField::scalar(g, [](auto x, double t) { return std::exp(-x[0] * x[0] / 4 - t * t / 4); });
}

double sup_diff(SpaceTimeField a, const SpaceTimeField& b) {
  a += -1.0 * b;
  return a.sup_norm();
}

SpaceTimeField implicit_heat(const Grid& g, Field cur) {
  SpaceTimeField out(g, 1);
  const double dt = g.dt();
  for (int j = 0; j < g.Nt; ++j) {
    out.set_slice(j, cur);
    cur = apply_multiplier(cur, [dt](auto k) { return cplx(1.0 / (1.0 + dt * k[0] * k[0])); });
  }
  return out;
}

Grid extension_grid() { return Grid::space_time(1, 64, kTwoPi, 32, kTwoPi); }

SpaceTimeField wave_a(const Grid& g) {
  return SpaceTimeField::scalar(g, [](auto x, double t) { return std::cos(x[0] + t); });
}
SpaceTimeField wave_b(const Grid& g) {
  return SpaceTimeField::scalar(g, [](auto x, double t) { return std::cos(2.0 * x[0] - 3.0 * t) + 0.5 * std::sin(x[0]); });
}

}  // namespace

TEST_CASE("symbol is zero at the origin and follows the principal branch") {
  CHECK(hs_symbol(0.0, 0.0, 0.4) == cplx(0.0));
  const cplx z = hs_symbol(4.0, 3.0, 0.5);
  CHECK(std::abs(z - std::sqrt(cplx(4.0, 3.0))) < 1e-15);
}

TEST_CASE("real plane wave is multiplied by the symbol") {
  const double L = 4.0, T = 2.0;
  const Grid g = Grid::space_time(1, 32, L, 16, T);
  const double kx = kTwoPi / L, om = 2.0 * kTwoPi / T;
  const auto v = SpaceTimeField::scalar(g, [&](auto x, double t) { return std::cos(kx * x[0] + om * t); });
  const cplx sym = hs_symbol(kx * kx, om, 0.3);
  const auto ref = SpaceTimeField::scalar(g, [&](auto x, double t) {
    return std::real(sym * std::exp(cplx(0.0, kx * x[0] + om * t)));
  });
  CHECK(sup_diff(hs_apply(v, 0.3, kPeriodic), ref) < 1e-13);
}

TEST_CASE("constants are annihilated") {
  const Grid g = Grid::space_time(1, 16, 2.0, 16, 2.0);
  const auto c = SpaceTimeField::scalar(g, [](auto, double) { return 2.0; });
  CHECK(hs_apply(c, 0.5, kPeriodic).sup_norm() < 1e-14);
}

TEST_CASE("integer power reduces to the heat operator") {
  const Grid g = Grid::space_time(1, 64, 20.0, 64, 20.0);
  const auto v = bump(g);
  const auto ref = apply_multiplier(v, [](auto k, double om) { return cplx(k[0] * k[0], om); });
  CHECK(sup_diff(hs_apply(v, 1.0, kPeriodic), ref) < 1e-13 * ref.sup_norm());
}

TEST_CASE("powers compose") {
  const Grid g = Grid::space_time(1, 64, 20.0, 64, 20.0);
  const auto v = bump(g);
  CHECK(sup_diff(hs_apply(hs_apply(v, 0.3, kPeriodic), 0.45, kPeriodic), hs_apply(v, 0.75, kPeriodic)) < 1e-12);
  CHECK(sup_diff(hs_apply(hs_apply(v, 0.3, kCausal), 0.45, kCausal), hs_apply(v, 0.75, kCausal)) < 1e-12);
}

TEST_CASE("causal solve inverts the causal operator") {
  const Grid g = Grid::space_time(1, 64, 20.0, 64, 20.0);
  const auto v = bump(g);
  CHECK(sup_diff(hs_apply(hs_solve(v, 0.5, kCausal), 0.5, kCausal), v) < 1e-12);
}

TEST_CASE("solve of a constant is zero and reports the removed mean") {
  const Grid g = Grid::space_time(1, 16, 2.0, 16, 2.0);
  const auto c = SpaceTimeField::scalar(g, [](auto, double) { return 1.5; });
  HsSolveReport rep;
  CHECK(hs_solve(c, 0.5, kPeriodic, &rep).sup_norm() < 1e-14);
  CHECK(rep.removed_mean == doctest::Approx(1.5));
}

TEST_CASE("causal solve of a nonnegative bump stays nonnegative") {
  const Grid g = Grid::space_time(1, 128, 8.0, 128, 2.5);
  const auto gb = SpaceTimeField::scalar(g, [](auto x, double t) {
    return std::exp(-x[0] * x[0] / 0.1) * std::exp(-(t + 0.8) * (t + 0.8) / 0.01);
  });
  for (double s : {0.25, 0.5, 0.75}) {
    const auto u = hs_solve(gb, s, kCausal);
    CHECK(*std::min_element(u.values().begin(), u.values().end()) >= -1e-6 * gb.sup_norm());
  }
}

TEST_CASE("causal operator with caloric history annihilates discrete caloric functions") {
  const Grid g = Grid::space_time(1, 256, 20.0, 128, 2.0);
  const Field f0 = Field::scalar(g.spatial(), [](auto x) { return std::exp(-x[0] * x[0] / 2) + 0.5 * std::cos(0.3 * kTwoPi * x[0]); });
  const auto F = implicit_heat(g, f0);
  for (double s : {0.25, 0.5, 0.75})
    CHECK(hs_apply(F, s, {TimeMode::causal, 0.0, History::caloric}).sup_norm() <= 1e-6 * F.sup_norm());
  CHECK_THROWS_AS(hs_apply(F, -0.5, {TimeMode::causal, 0.0, History::caloric}), ConfigError);
}

TEST_CASE("binomial series of (1 - w)^s") {
  const auto b = binomial_series(0.3, 4);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == doctest::Approx(-0.3));
  CHECK(b[2] == doctest::Approx(0.3 * (0.3 - 1.0) / 2.0));
  CHECK(b[3] == doctest::Approx(-0.3 * (0.3 - 1.0) * (0.3 - 2.0) / 6.0));
}

TEST_CASE("extension multiplier matches the Bessel closed form") {
  for (double s : {0.25, 0.5, 0.75})
    for (double y : {1e-3, 0.1, 0.5})
      for (double lam : {0.01, 1.0, 100.0}) {
        const cplx m = extension_multiplier(y, lam, 0.0, s, y * y / 400.0, 50.0 * 800.0, 200, nullptr);
        CHECK(std::abs(m - extension_multiplier_exact(y, lam, s)) < 1e-10);
      }
  const cplx a = extension_multiplier(0.3, 1.0, 5.0, 0.5, 0.09 / 400.0, 4e4, 200, nullptr);
  CHECK(std::abs(a - std::exp(-0.3 * std::sqrt(cplx(1.0, 5.0)))) < 1e-10);
}

TEST_CASE("constant trace extends to a constant") {
  const Grid g = extension_grid();
  const auto one = SpaceTimeField::scalar(g, [](auto, double) { return 1.0; });
  for (double s : {0.25, 0.5, 0.75}) {
    const auto st = extension_build(one, FracParams::make(s), {1e-3, 0.1, 0.5});
    for (const auto& sl : st.slices) CHECK(sup_diff(sl, one) <= 1e-10);
  }
}

TEST_CASE("trace is recovered at order 2s") {
  const Grid g = extension_grid();
  const auto v = wave_b(g);
  for (double s : {0.25, 0.5, 0.75}) {
    const std::vector<double> ys = log_levels(1e-4, 1e-2, 3);
    const auto st = extension_build(v, FracParams::make(s), ys);
    const double e0 = sup_diff(st.slices[0], v), e2 = sup_diff(st.slices[2], v);
    CHECK(e0 < e2);
    CHECK(std::log(e2 / e0) / std::log(ys[2] / ys[0]) >= std::min(1.0, 2.0 * s) - 0.1);
  }
}

TEST_CASE("weighted equation residual shrinks under y refinement") {
  const Grid g = extension_grid();
  const auto v = wave_b(g);
  for (double s : {0.25, 0.5, 0.75}) {
    double prev = 0.0;
    for (double dy : {0.025, 0.0125}) {
      std::vector<double> ys{0.01};
      for (int k = 0; k <= static_cast<int>(0.4 / dy + 0.5); ++k) ys.push_back(0.2 + k * dy);
      const double r = extension_residual(extension_build(v, FracParams::make(s), ys)).max_relative();
      if (prev > 0.0) CHECK(r <= 0.55 * prev);
      prev = r;
    }
    CHECK(prev < 1e-2);
  }
}

TEST_CASE("neumann constant is consistent across probes and positive") {
  const Grid g = extension_grid();
  for (double s : {0.25, 0.5, 0.75}) {
    const auto p = FracParams::make(s);
    const auto ea = neumann_trace_estimate(wave_a(g), p);
    const auto eb = neumann_trace_estimate(wave_b(g), p);
    const auto e3 = neumann_trace_estimate(3.0 * wave_b(g), p);
    CHECK(ea.C_est > 0.0);
    CHECK(ea.spread <= 0.02);
    CHECK(std::abs(ea.C_est - eb.C_est) <= 0.02 * ea.C_est);
    CHECK(e3.C_est == doctest::Approx(eb.C_est).epsilon(1e-9));
    CHECK(ea.C_est == doctest::Approx(neumann_constant_reference(s)).epsilon(1e-4));
  }
}

TEST_CASE("stack round trip") {
  const Grid g = extension_grid();
  const auto st = extension_build(wave_a(g), FracParams::make(0.5), {1e-3, 0.1});
  const auto dir = std::filesystem::temp_directory_path() / "fhl_stack_roundtrip";
  write_stack(dir, st);
  const auto back = read_stack(dir);
  CHECK(back.y_levels == st.y_levels);
  CHECK(back.p.s == st.p.s);
  CHECK(sup_diff(back.slices[1], st.slices[1]) == 0.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bilinear C of a constant vanishes and is nonnegative") {
  const Grid g = Grid::space_time(1, 64, 8.0, 64, 8.0);
  const auto c = SpaceTimeField::scalar(g, [](auto, double) { return 0.3; });
  CHECK(bilinear_C(c).sup_norm() < 1e-14);
  const auto u = SpaceTimeField::scalar(g, [](auto x, double t) { return std::exp(-x[0] * x[0]) * std::cos(t); });
  const auto cu = bilinear_C(u);
  CHECK(*std::min_element(cu.values().begin(), cu.values().end()) >= -1e-12);
}

TEST_CASE("bilinear C of a time-independent field against a z-then-tau oracle") {
  const Grid g = Grid::space_time(1, 64, kTwoPi, 16, 4.0);
  const auto u = SpaceTimeField::scalar(g, [](auto x, double) { return std::cos(x[0]) + 0.5 * std::sin(2.0 * x[0]); });
  const auto cu = bilinear_C(u);

  boost::math::quadrature::exp_sinh<double> es;
  const double norm = 2.0 * std::sqrt(std::numbers::pi);  // |Gamma(-1/2)|
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < g.N; i += 4) {
    const double x = g.coord(i);
    const double ux = std::cos(x) + 0.5 * std::sin(2.0 * x);
    // Gaussian averages in z (variance 2 tau) of u(x - z) - u(x) and u(x - z)^2 - u(x)^2.
    auto gap = [&](double tau) {
      if (tau < 1e-300) return 0.0;
      const double dmean = std::cos(x) * std::expm1(-tau) + 0.5 * std::sin(2.0 * x) * std::expm1(-4.0 * tau);
      const double dsq = 0.5 * std::cos(2.0 * x) * std::expm1(-4.0 * tau) + 0.5 * std::sin(3.0 * x) * std::expm1(-9.0 * tau) +
                         0.5 * std::sin(x) * std::expm1(-tau) - 0.125 * std::cos(4.0 * x) * std::expm1(-16.0 * tau);
      return 0.5 * (dsq - 2.0 * ux * dmean) / (norm * std::pow(tau, 1.5));
    };
    const double ref = es.integrate(gap);
    worst = std::max(worst, std::abs(cu.at(0, i) - ref));
    scale = std::max(scale, std::abs(ref));
  }
  CHECK(worst <= 1e-3 * scale);
}
