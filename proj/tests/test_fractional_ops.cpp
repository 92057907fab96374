#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fhl/errors.hpp"
#include "fhl/fractional_ops.hpp"

using namespace fhl;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Field gaussian(const Grid& g) {
  return Field::scalar(g, [](auto x) { return std::exp(-x[0] * x[0]); });
}

double rel_sup(const Field& a, const Field& b) { return (a - b).sup_norm() / b.sup_norm(); }

}  // namespace

TEST_CASE("default normalization at s = 1/2 in one dimension is 1/pi") {
  CHECK(FracParams::make(0.5).c_norm == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
  CHECK_THROWS_AS(FracParams::make(1.0).validate(), ConfigError);
}

TEST_CASE("spectral operator on constants and eigenfunctions") {
  const Grid g = Grid::space(1, 64, kTwoPi);
  const Field c = Field::scalar(g, [](auto) { return 3.0; });
  const Field cos1 = Field::scalar(g, [](auto x) { return std::cos(x[0]); });
  const Field cos2 = Field::scalar(g, [](auto x) { return std::cos(2.0 * x[0]); });
  CHECK(frac_laplacian_spectral(c, FracParams::make(0.3)).sup_norm() < 1e-13);
  for (double s : {0.25, 0.5, 0.75}) CHECK((frac_laplacian_spectral(cos1, FracParams::make(s)) - cos1).sup_norm() < 1e-13);
  CHECK((frac_laplacian_spectral(cos2, FracParams::make(0.5)) - 2.0 * cos2).sup_norm() < 1e-13);
}

TEST_CASE("lattice quadrature on constants and the unit mode") {
  const Grid g = Grid::space(1, 128, kTwoPi);
  const Field c = Field::scalar(g, [](auto) { return -1.5; });
  const Field cos1 = Field::scalar(g, [](auto x) { return std::cos(x[0]); });
  CHECK(frac_laplacian_quadrature(c, FracParams::make(0.5)).sup_norm() < 1e-12);
  CHECK(rel_sup(frac_laplacian_quadrature(cos1, FracParams::make(0.25)), cos1) < 1e-3);
}

TEST_CASE("lattice quadrature agrees with the spectral operator on a Gaussian") {
  const Grid g = Grid::space(1, 256, 20.0);
  const Field u = gaussian(g);
  for (double s : {0.25, 0.5, 0.75}) {
    const auto p = FracParams::make(s);
    CHECK(rel_sup(frac_laplacian_quadrature(u, p), frac_laplacian_spectral(u, p)) < 1e-3);
  }
}

TEST_CASE("bilinear form on constants and its sign") {
  const Grid g = Grid::space(1, 64, 10.0);
  const auto p = FracParams::make(0.5);
  const Field c = Field::scalar(g, [](auto) { return 0.7; });
  const Field w = Field::scalar(g, [](auto x) { return std::sin(x[0]) + 0.3 * x[0]; });
  const Field u = Field::scalar(g, [](auto x) { return std::tanh(x[0]) * std::cos(3.0 * x[0]); });
  CHECK(bilinear_B(c, w, p, BMode::kernel_consistent).sup_norm() < 1e-12);
  const Field b = bilinear_B(u, u, p, BMode::kernel_consistent);
  CHECK(*std::min_element(b.values().begin(), b.values().end()) >= 0.0);
}

TEST_CASE("continuum bilinear form at the origin against adaptive quadrature") {
  const Grid g = Grid::space(1, 256, 40.0);
  const auto p = FracParams::make(0.5);
  const Field u = gaussian(g);

  boost::math::quadrature::exp_sinh<double> es;
  const double half = es.integrate([](double y) {
    if (y < 1e-100) return 0.0;
    const double d = -std::expm1(-y * y);
    return d * d / (y * y);
  });
  const double oracle = 0.5 * p.c_norm * 2.0 * half;
  CHECK(oracle == doctest::Approx(0.330494606292647).epsilon(1e-10));
  CHECK(bilinear_B_at(u, u, p, 0.0) == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("carre du champ identity is algebraic for the lattice kernel") {
  const Grid g = Grid::space(1, 128, 12.0);
  const Field u = Field::scalar(g, [](auto x) { return std::exp(-x[0] * x[0]) * (1.0 + 0.5 * std::sin(2.0 * x[0])); });
  const Field c = Field::scalar(g, [](auto) { return 0.4; });
  const double scale = u.sup_norm() * frac_laplacian_quadrature(u, FracParams::make(0.5)).sup_norm();
  for (double s : {0.25, 0.5, 0.75}) CHECK(carre_du_champ_residual(u, FracParams::make(s)) <= 1e-12 * scale);
  CHECK(carre_du_champ_residual(c, FracParams::make(0.5)) == 0.0);
}

TEST_CASE("continuum carre du champ residual shrinks under refinement") {
  const auto p = FracParams::make(0.5);
  const Grid coarse = Grid::space(1, 256, 40.0), fine = Grid::space(1, 512, 40.0);
  const auto rc = carre_du_champ_continuum(gaussian(coarse), p);
  const auto rf = carre_du_champ_continuum(gaussian(fine), p);
  CHECK(rf.residual <= 1e-3 * rf.scale);
  CHECK(rf.residual / rf.scale < rc.residual / rc.scale);
}

TEST_CASE("scaling identity of the bilinear form") {
  const Grid g = Grid::space(1, 256, 30.0);
  const auto p = FracParams::make(0.5);
  const Field c = Field::scalar(g, [](auto) { return 1.0; });
  CHECK(scaling_check(gaussian(g), 1.0, p) < 1e-12);
  CHECK(scaling_check(c, 0.5, p) < 1e-12);
  CHECK(scaling_check(gaussian(g), 0.5, p) <= 1e-3);
}

TEST_CASE("mismatched operands are rejected") {
  const auto p = FracParams::make(0.5);
  const Field a = gaussian(Grid::space(1, 64, 10.0)), b = gaussian(Grid::space(1, 32, 10.0));
  CHECK_THROWS_AS(bilinear_B(a, b, p, BMode::kernel_consistent), GridMismatchError);
}
