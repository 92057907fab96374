#pragma once

#include <vector>

#include "fhl/field.hpp"

namespace fhl {

/// Fractional order s, extension weight a = 1 - 2s and kernel normalization.
struct FracParams {
  double s = 0.5;
  double a = 0.0;
  double c_norm = 0.0;

  /// s in (0, 1); c_norm defaults to 4^s Gamma(n/2 + s) / (pi^{n/2} |Gamma(-s)|).
  static FracParams make(double s, int n = 1);
  void validate() const;
};

double default_c_norm(double s, int n);

/// Positive operator with symbol |kappa|^{2s}; zero mode maps to 0.
Field frac_laplacian_spectral(const Field& u, const FracParams& p);

/// Discrete symmetric kernel W(r), r = 0..N-1 (W(0) = 0), of the 1-D lattice
/// quadrature of (-Delta)^s on the torus:
///   L u(x) = sum_r W(r) (u(x) - u(x + r h)).
/// Far field is the full periodic lattice sum (periodized kernel through the
/// Hurwitz zeta function); the near field carries Euler-Maclaurin corrections
/// proportional to zeta(2s-1) h^{2-2s} and zeta(2s-3) h^{4-2s}.
struct LatticeKernel {
  Grid grid;
  FracParams params;
  std::vector<double> weights;
  /// Remainder of the far field beyond the torus; zero for the periodized sum.
  double truncation_bound = 0.0;

  static LatticeKernel build(const Grid& g, const FracParams& p);
  /// Eigenvalue of the discrete operator on the FFT mode with index i.
  double symbol(int i) const;
};

Field frac_laplacian_quadrature(const Field& u, const FracParams& p);
Field apply_lattice(const Field& u, const LatticeKernel& k);

enum class BMode { kernel_consistent, continuum_quadrature };

/// B(u, w)(x) = (c_norm / 2) * integral (u(x)-u(y)).(w(x)-w(y)) / |x-y|^{n+2s} dy.
/// kernel_consistent uses the lattice kernel of frac_laplacian_quadrature;
/// continuum_quadrature integrates the continuum kernel adaptively over the
/// trigonometric interpolant on the union of grid cells; outside the box the
/// field is replaced by its outer-shell mean (whole-space reading).
/// Throws GridMismatchError if u and w differ in grid or m.
Field bilinear_B(const Field& u, const Field& w, const FracParams& p, BMode mode);
Field bilinear_B(const Field& u, const Field& w, const LatticeKernel& k);

/// Continuum B(u, w) evaluated at an arbitrary point x of the box (1-D).
double bilinear_B_at(const Field& u, const Field& w, const FracParams& p, double x);

/// sup |L(u^2) - 2 u L u + 2 B(u, u)| in kernel-consistent form.
double carre_du_champ_residual(const Field& u, const FracParams& p);

struct CarreDuChampReport {
  double residual = 0.0;
  double scale = 0.0;
};
/// Same identity with L spectral and B continuum-quadrature.
CarreDuChampReport carre_du_champ_continuum(const Field& u, const FracParams& p);

/// Relative sup discrepancy between B(u_lambda)(x) and lambda^{2s} B(u)(lambda x),
/// u_lambda(x) = u(lambda x), on grid points (continuum B). lambda in (0, 1];
/// throws ConfigError when u_lambda fails the decay gate.
double scaling_check(const Field& u, double lambda, const FracParams& p);

/// Evaluates the trigonometric interpolant of a 1-D scalar array at x.
class TrigInterpolant {
 public:
  TrigInterpolant(const Grid& g, std::span<const double> data);
  double operator()(double x) const;

 private:
  double L_;
  double mean_;
  std::vector<double> a_, b_;  // cos / sin coefficients for k = 1..N/2
};

}  // namespace fhl
