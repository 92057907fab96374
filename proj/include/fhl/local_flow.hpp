#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fhl/field.hpp"
#include "fhl/trajectory.hpp"

namespace fhl {

/// Right-hand side f(x, u, Du) of u_t - Delta u = f with the structural bounds
/// |f| <= a_growth |Du|^2 and u.f <= l |Du|^2. Du is laid out as Du[c*n + i] = d_i u_c.
struct StructuredRHS {
  double a_growth = 1.0;
  double l = 0.0;
  std::function<void(std::array<double, 2> x, std::span<const double> u, std::span<const double> du,
                     std::span<double> out)>
      rhs;
};

/// f = u |Du|^2 with a_growth = 1 and l = M (valid whenever |u| <= M <= 1).
StructuredRHS harmonic_map_rhs(double M);

struct ValidatorReport {
  std::size_t samples = 0;
  std::size_t growth_violations = 0;
  std::size_t aligned_violations = 0;
  double max_growth_ratio = 0.0;   // max |f| / |Du|^2
  double max_aligned_ratio = 0.0;  // max u.f / |Du|^2
  bool ok() const { return growth_violations == 0 && aligned_violations == 0; }
};

/// Samples (u, Du) from the field itself and from `random_samples` seeded draws
/// with |u| <= radius, and checks both structural bounds (relative slack 1e-12).
ValidatorReport validate_structured(const StructuredRHS& f, const Field& u, double radius,
                                    std::size_t random_samples = 1000, std::uint64_t seed = 12345);

/// Delta u + u |Du|^2 with spectral derivatives; the product is 2/3-dealiased.
Field local_rhs(const Field& u);

struct LocalOptions {
  bool nonlinear = true;
  double safety = 1.0;
};

/// Largest admissible step: min(h^2/4, 1e-3) * safety.
double local_dt_max(const Grid& g, double safety = 1.0);

/// One IMEX step: diffusion implicit (1 / (1 + dt |kappa|^2)), u |Du|^2 explicit.
/// Throws ConfigError when dt is outside the stability policy.
Field step_local(const Field& u, double dt, const LocalOptions& opt = {});

struct LocalRunOptions {
  LocalOptions step;
  double t_start = 0.0;
  int sample_every = 1;
  double max_M = 0.99;
  double divergence_limit = 10.0;
};

struct FlowDiagnostics {
  std::vector<double> times;
  std::vector<double> sup_norm;
  std::vector<double> sphere_defect;  // max | |u|^2 - 1 | (sphere-valued runs only)
  std::vector<double> energy;         // 1/2 integral |Du|^2
  bool sphere_valued = false;
  double max_sphere_defect = 0.0;
};

struct LocalRun {
  Trajectory trajectory;
  FlowDiagnostics diagnostics;
};

/// Integrates from t_start to t_start + T. Requires |u0| <= max_M unless u0 is
/// sphere-valued (| |u0| - 1 | <= 1e-10 everywhere), which is recorded.
/// Throws DivergenceError if the sup norm exceeds divergence_limit.
LocalRun run_local(const Field& u0, double T, double dt, const LocalRunOptions& opt = {});

/// Spectral gradient Du[c*n + i] per point, as n*m components.
std::vector<std::vector<double>> spectral_gradient(const Field& u);
double dirichlet_energy(const Field& u);

}  // namespace fhl
