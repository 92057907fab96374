#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fhl/errors.hpp"
#include "fhl/fractional_flow.hpp"
#include "fhl/spectral.hpp"

using namespace fhl;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Field smooth_data(const Grid& g) {
  return Field::scalar(g, [](auto x) { return 0.3 + 0.2 * std::cos(x[0]) + 0.1 * std::sin(2.0 * x[0]); });
}

}  // namespace

TEST_CASE("constants stay put with a zero rhs") {
  const Grid g = Grid::space(1, 64, kTwoPi);
  const auto p = FracParams::make(0.5);
  const auto k = LatticeKernel::build(g, p);
  const Field c = Field::scalar(g, [](auto) { return 0.42; });
  const NonlocalRHS zero = zero_rhs();
  CHECK((step_fractional(c, 1e-3, k, &zero) - c).sup_norm() < 1e-15);
}

TEST_CASE("single mode decays by the implicit factor") {
  const Grid g = Grid::space(1, 64, kTwoPi);
  const auto p = FracParams::make(0.5);
  const auto k = LatticeKernel::build(g, p);
  const Field u = Field::scalar(g, [](auto x) { return 0.5 * std::cos(x[0]); });
  const double dt = 1e-3;
  CHECK((step_fractional(u, dt, k, nullptr) - (1.0 / (1.0 + dt)) * u).sup_norm() < 1e-15);
}

TEST_CASE("one step against two half steps is second order locally") {
  const Grid g = Grid::space(1, 128, kTwoPi);
  const auto p = FracParams::make(0.5);
  const auto k = LatticeKernel::build(g, p);
  const Field u = Field::sample(g, 2, [](auto x, std::span<double> o) {
    const double th = 0.1 * std::sin(x[0]);
    o[0] = std::cos(th);
    o[1] = std::sin(th);
  });
  const NonlocalRHS rhs = frac_harmonic_rhs(1.0);
  auto defect = [&](double dt) {
    const Field half = step_fractional(step_fractional(u, dt / 2, k, &rhs), dt / 2, k, &rhs);
    return (step_fractional(u, dt, k, &rhs) - half).sup_norm();
  };
  const double e1 = defect(1e-3), e2 = defect(5e-4);
  CHECK(e1 < 1e-5);
  CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("validator finds no hypothesis hits for u B(u,u)") {
  const Grid g = Grid::space(1, 256, kTwoPi);
  const auto p = FracParams::make(0.5);
  const Field u = smooth_data(g);
  const auto rep = validate_nonlocal(frac_harmonic_rhs(u.sup_norm()), u, LatticeKernel::build(g, p), u.sup_norm());
  CHECK(rep.ok());
}

TEST_CASE("constant initial data gives a constant trajectory") {
  const Grid g = Grid::space(1, 64, kTwoPi);
  const auto p = FracParams::make(0.25);
  const Field c = Field::scalar(g, [](auto) { return -0.3; });
  const auto run = run_fractional(c, 0.05, fractional_dt_max(g, p), p, frac_harmonic_rhs(0.3));
  for (const auto& f : run.trajectory.frames) CHECK((f - c).sup_norm() < 1e-15);
}

TEST_CASE("linear run follows the exact multiplier evolution") {
  const Grid g = Grid::space(1, 128, 20.0);
  const auto p = FracParams::make(0.5);
  const Field u0 = Field::scalar(g, [](auto x) { return 0.5 * std::exp(-x[0] * x[0]); });
  FractionalRunOptions opt;
  opt.sample_every = 1000;
  const auto run = run_fractional(u0, 0.1, 1e-5, p, zero_rhs(), opt);
  const Field exact = apply_multiplier(u0, [](auto kv) { return cplx(std::exp(-0.1 * std::abs(kv[0]))); });
  CHECK((run.trajectory.frames.back() - exact).sup_norm() < 1e-4);
}

TEST_CASE("nonlinear run keeps the sup norm and converges under step halving") {
  const Grid g = Grid::space(1, 256, kTwoPi);
  const auto p = FracParams::make(0.5);
  const Field u0 = smooth_data(g);
  const auto rhs = frac_harmonic_rhs(u0.sup_norm());
  const double dt = fractional_dt_max(g, p);
  const auto a = run_fractional(u0, 0.1, dt, p, rhs);
  const auto b = run_fractional(u0, 0.1, dt / 2, p, rhs);
  for (std::size_t i = 1; i < a.stats.sup_norm.size(); ++i) CHECK(a.stats.sup_norm[i] <= a.stats.sup_norm[i - 1] + 1e-6);
  CHECK((a.trajectory.frames.back() - b.trajectory.frames.back()).sup_norm() < 1e-4);
  CHECK(a.stats.total_hits() == 0);
}

TEST_CASE("step above the stability policy is rejected") {
  const Grid g = Grid::space(1, 64, kTwoPi);
  const auto p = FracParams::make(0.5);
  const auto k = LatticeKernel::build(g, p);
  CHECK_THROWS_AS(step_fractional(smooth_data(g), 2.0 * fractional_dt_max(g, p), k, nullptr), ConfigError);
}
