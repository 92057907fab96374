#pragma once

#include <filesystem>
#include <vector>

#include "fhl/field.hpp"
#include "fhl/fractional_ops.hpp"
#include "fhl/spectral.hpp"

namespace fhl {

/// Time treatment of the space-time multiplier.
///  periodic: exact multiplier on the space-time torus.
///  padded:   zero samples appended to the time axis (pad_fraction of Nt) before the transform.
///  causal:   per spatial mode, backward-Euler convolution quadrature of ((1 - z)/dt + |kappa|^2)^s.
enum class TimeMode { periodic, padded, causal };

/// History assumed before the first time sample in causal mode.
enum class History { zero, caloric };

struct HsOptions {
  TimeMode mode = TimeMode::padded;
  double pad_fraction = 0.25;
  History history = History::caloric;
};

/// Principal branch of (|kappa|^2 + i omega)^s; zero at the origin.
cplx hs_symbol(double kappa2, double omega, double s);

/// H^s F = (d_t - Delta)^s F componentwise. s may be any real in causal and
/// periodic mode (negative s gives the inverse power on nonzero modes).
SpaceTimeField hs_apply(const SpaceTimeField& F, double s, const HsOptions& opt = {});

struct HsSolveReport {
  double removed_mean = 0.0;  // value of the projected (0,0) mode, first component
};

/// Right inverse of hs_apply. periodic and padded divide by the symbol on
/// nonzero modes and drop the mean; causal applies the -s power with zero history.
SpaceTimeField hs_solve(const SpaceTimeField& g, double s, const HsOptions& opt = {}, HsSolveReport* report = nullptr);

/// Coefficients of (1 - w)^s, k = 0..K-1.
std::vector<double> binomial_series(double s, int K);

/// U(x, y, t) of the extension problem with trace v, at increasing heights y.
struct ExtensionStack {
  SpaceTimeField base;
  std::vector<double> y_levels;
  std::vector<SpaceTimeField> slices;
  FracParams p;

  void validate() const;
};

struct ExtensionQuadrature {
  int nodes = 200;
  double tau_min_factor = 1.0 / 400.0;  // tau_min = factor * y^2
  double tau_max_factor = 50.0;         // tau_max = factor * (T_len^2 + L^2)
  double tail_tolerance = 1e-10;
};

/// Per-mode extension multiplier y^{2s}/(2^{2s} Gamma(s)) int tau^{-1-s} e^{-y^2/4tau} e^{-tau lambda} dtau,
/// lambda = |kappa|^2 + i omega, by log-spaced trapezoid on the rotated ray tau = t e^{-i arg(lambda)/2}.
/// `tail` receives the analytic bound of the discarded tails (relative to 1).
cplx extension_multiplier(double y, double kappa2, double omega, double s, double tau_min, double tau_max, int nodes,
                          double* tail = nullptr);

/// Closed form (2^{1-s}/Gamma(s)) z^s K_s(z), z = y sqrt(lambda), real lambda > 0 only.
double extension_multiplier_exact(double y, double lambda, double s);

/// Throws AccuracyError when a tail bound exceeds the tolerance.
ExtensionStack extension_build(const SpaceTimeField& v, const FracParams& p, const std::vector<double>& y_levels,
                               const ExtensionQuadrature& q = {});

/// Log-spaced heights y_min * ratio^k, k = 0..count-1.
std::vector<double> log_levels(double y_min, double y_max, int count);

struct ExtensionResidual {
  std::vector<double> y;         // levels where the residual is evaluated
  std::vector<double> residual;  // sup |div(y^a grad U) - y^a U_t|
  std::vector<double> scale;     // sup |y^a (Delta U - U_t)|
  double max_relative() const;
};

/// Residual of the weighted equation on the interior levels (3-point differences
/// in y, spectral in x and t).
ExtensionResidual extension_residual(const ExtensionStack& st);

struct NeumannEstimate {
  double C_est = 0.0;
  double spread = 0.0;   // max relative deviation of per-probe ratios from C_est
  std::size_t probes = 0;
  double level = 0.0;    // height used for the estimate
};

/// Fits -y^a dU/dy at the smallest levels against hs_apply(v) (periodic) on
/// probe points where |hs_apply(v)| >= probe_fraction * max. Throws EstimationError
/// when no probe qualifies or fewer than three levels are given.
NeumannEstimate neumann_trace_estimate(const SpaceTimeField& v, const FracParams& p,
                                       const std::vector<double>& y_levels = log_levels(1e-6, 1e-4, 5),
                                       double probe_fraction = 0.1);
NeumannEstimate neumann_trace_estimate(const ExtensionStack& st, double probe_fraction = 0.1);

/// Reference value 2^{1-2s} Gamma(1-s)/Gamma(s), reported only.
double neumann_constant_reference(double s);

/// C(u,u) = 1/2 int int |u(x,t) - u(x-z,t-tau)|^2 e^{-|z|^2/4tau} / ((4 pi)^{n/2} |Gamma(-1/2)| tau^{n/2+3/2}) dz dtau,
/// evaluated as u.H^{1/2}u - 1/2 H^{1/2}|u|^2 with the given time treatment.
SpaceTimeField bilinear_C(const SpaceTimeField& u, const HsOptions& opt = {TimeMode::periodic, 0.25, History::caloric});

void write_stack(const std::filesystem::path& dir, const ExtensionStack& st);
ExtensionStack read_stack(const std::filesystem::path& dir);

}  // namespace fhl
