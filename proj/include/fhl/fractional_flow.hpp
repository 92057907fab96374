#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "fhl/fractional_ops.hpp"
#include "fhl/local_flow.hpp"

namespace fhl {

/// Right-hand side f(x, u, B(u,u)) of u_t + (-Delta)^s u = f with the bounds
/// |f| <= a_growth B(u,u) and u.f <= l B(u,u).
struct NonlocalRHS {
  double a_growth = 1.0;
  double l = 0.0;
  std::function<void(std::array<double, 2> x, std::span<const double> u, double b, std::span<double> out)> rhs;
};

/// f = u B(u,u) with a_growth = M and l = M^2.
NonlocalRHS frac_harmonic_rhs(double M);
NonlocalRHS zero_rhs();

/// Checks both bounds on the grid points of u (B kernel-consistent) and on
/// seeded random draws with |u| <= radius and B in [0, 1e2].
ValidatorReport validate_nonlocal(const NonlocalRHS& f, const Field& u, const LatticeKernel& k, double radius,
                                  std::size_t random_samples = 1000, std::uint64_t seed = 12345);

/// min(1e-3, h^{2s}/4) * safety.
double fractional_dt_max(const Grid& g, const FracParams& p, double safety = 1.0);

/// IMEX step: 1/(1 + dt |kappa|^{2s}) implicit, f(x, u, B(u,u)) explicit with the
/// kernel-consistent B. With no rhs the step is purely linear.
Field step_fractional(const Field& u, double dt, const LatticeKernel& k, const NonlocalRHS* rhs, double safety = 1.0);
Field step_fractional(const Field& u, double dt, const FracParams& p);

struct FractionalRunOptions {
  double t_start = 0.0;
  int sample_every = 1;
  double max_M = 0.99;
  double divergence_limit = 10.0;
  double safety = 1.0;
};

/// Per-step statistics of B(u,u) and validator hits.
struct BStats {
  std::vector<double> times;
  std::vector<double> sup_norm;
  std::vector<double> b_max;
  std::vector<double> b_mean;
  std::vector<std::size_t> h11_hits;  // |f| > a_growth B
  std::vector<std::size_t> h12_hits;  // u.f > l B
  std::size_t total_hits() const;
};

struct FractionalRun {
  Trajectory trajectory;
  BStats stats;
};

/// Integrates from t_start to t_start + T. Hypothesis hits are counted against
/// rhs.a_growth and rhs.l at every step (frac_harmonic_rhs(sup |u0|) gives M, M^2).
FractionalRun run_fractional(const Field& u0, double T, double dt, const FracParams& p, const NonlocalRHS& rhs,
                             const FractionalRunOptions& opt = {});

void write_bstats_csv(const std::filesystem::path& path, const BStats& st);

}  // namespace fhl
