#include "fhl/local_flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fhl/errors.hpp"
#include "fhl/spectral.hpp"

namespace fhl {

StructuredRHS harmonic_map_rhs(double M) {
  StructuredRHS f;
  f.a_growth = 1.0;
  f.l = M;
  f.rhs = [](std::array<double, 2>, std::span<const double> u, std::span<const double> du, std::span<double> out) {
    double g2 = 0.0;
    for (double d : du) g2 += d * d;
    for (std::size_t c = 0; c < u.size(); ++c) out[c] = u[c] * g2;
  };
  return f;
}

namespace {

void check_sample(const StructuredRHS& f, std::array<double, 2> x, std::span<const double> u,
                  std::span<const double> du, std::vector<double>& out, ValidatorReport& rep) {
  f.rhs(x, u, du, out);
  double g2 = 0.0;
  for (double d : du) g2 += d * d;
  double fn = 0.0, uf = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    fn += out[c] * out[c];
    uf += u[c] * out[c];
  }
  fn = std::sqrt(fn);
  ++rep.samples;
  const double slack = 1e-12 * (1.0 + g2);
  if (fn > f.a_growth * g2 + slack) ++rep.growth_violations;
  if (uf > f.l * g2 + slack) ++rep.aligned_violations;
  if (g2 > 0.0) {
    rep.max_growth_ratio = std::max(rep.max_growth_ratio, fn / g2);
    rep.max_aligned_ratio = std::max(rep.max_aligned_ratio, uf / g2);
  }
}

}  // namespace

ValidatorReport validate_structured(const StructuredRHS& f, const Field& u, double radius,
                                    std::size_t random_samples, std::uint64_t seed) {
  if (!f.rhs) throw ConfigError("structured rhs has no callable");
  const Grid& g = u.grid();
  const int m = u.m();
  const int n = g.n;
  ValidatorReport rep;
  std::vector<double> out(m), uu(m), du(static_cast<std::size_t>(m) * n);

  const auto grad = spectral_gradient(u);
  for (std::size_t p = 0; p < u.points(); ++p) {
    for (int c = 0; c < m; ++c) uu[c] = u.at(p, c);
    for (int k = 0; k < m * n; ++k) du[k] = grad[k][p];
    check_sample(f, g.point(p), uu, du, out, rep);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t k = 0; k < random_samples; ++k) {
    double nrm = 0.0;
    for (int c = 0; c < m; ++c) {
      uu[c] = normal(rng);
      nrm += uu[c] * uu[c];
    }
    const double r = radius * std::pow(unif(rng), 1.0 / m) / std::max(std::sqrt(nrm), 1e-300);
    for (int c = 0; c < m; ++c) uu[c] *= r;
    const double scale = std::exp(4.0 * (unif(rng) - 0.5) * std::log(10.0));
    for (auto& d : du) d = scale * normal(rng);
    std::array<double, 2> x{(unif(rng) - 0.5) * g.L, n == 2 ? (unif(rng) - 0.5) * g.L : 0.0};
    check_sample(f, x, uu, du, out, rep);
  }
  return rep;
}

std::vector<std::vector<double>> spectral_gradient(const Field& u) {
  const Grid& g = u.grid();
  std::vector<std::vector<double>> grad;
  grad.reserve(static_cast<std::size_t>(u.m()) * g.n);
  for (int c = 0; c < u.m(); ++c) {
    const auto comp = u.component(c);
    for (int i = 0; i < g.n; ++i) grad.push_back(spectral_derivative(g, comp, i));
  }
  return grad;
}

double dirichlet_energy(const Field& u) {
  const auto grad = spectral_gradient(u);
  double e = 0.0;
  for (const auto& d : grad)
    for (double v : d) e += v * v;
  return 0.5 * e * std::pow(u.grid().h(), u.grid().n);
}

namespace {

std::vector<int> dims_of(const Grid& g) { return g.n == 1 ? std::vector<int>{g.N} : std::vector<int>{g.N, g.N}; }

// u |Du|^2 with the 2/3 rule applied to the product.
Field nonlinear_term(const Field& u) {
  const Grid& g = u.grid();
  const auto grad = spectral_gradient(u);
  std::vector<double> g2(u.points(), 0.0);
  for (const auto& d : grad)
    for (std::size_t p = 0; p < d.size(); ++p) g2[p] += d[p] * d[p];
  const auto mask = dealias_mask(g);
  std::vector<cplx> mtab(mask.begin(), mask.end());
  Field out(g, u.m());
  std::vector<double> prod(u.points());
  for (int c = 0; c < u.m(); ++c) {
    for (std::size_t p = 0; p < u.points(); ++p) prod[p] = u.at(p, c) * g2[p];
    out.set_component(c, apply_table(g, prod, mtab));
  }
  return out;
}

}  // namespace

Field local_rhs(const Field& u) {
  Field out = nonlinear_term(u);
  for (int c = 0; c < u.m(); ++c) {
    auto lap = spectral_laplacian(u.grid(), u.component(c));
    auto cur = out.component(c);
    for (std::size_t p = 0; p < lap.size(); ++p) cur[p] += lap[p];
    out.set_component(c, cur);
  }
  return out;
}

double local_dt_max(const Grid& g, double safety) {
  const double h = g.h();
  return std::min(h * h / 4.0, 1e-3) * safety;
}

Field step_local(const Field& u, double dt, const LocalOptions& opt) {
  if (!(dt > 0.0) || dt > local_dt_max(u.grid(), opt.safety) * (1.0 + 1e-12))
    throw ConfigError("time step outside stability policy min(h^2/4, 1e-3)");
  const Grid& g = u.grid();
  Field rhs = opt.nonlinear ? nonlinear_term(u) : Field(g, u.m());
  const auto dims = dims_of(g);
  const std::size_t P = u.points();
  std::vector<cplx> buf(P);
  Field out(g, u.m());
  std::vector<double> res(P);
  for (int c = 0; c < u.m(); ++c) {
    for (std::size_t p = 0; p < P; ++p) buf[p] = u.at(p, c) + dt * rhs.at(p, c);
    fft_forward(buf, dims);
    for (std::size_t p = 0; p < P; ++p) buf[p] /= 1.0 + dt * kappa_squared(g, p);
    fft_inverse(buf, dims);
    for (std::size_t p = 0; p < P; ++p) res[p] = buf[p].real();
    out.set_component(c, res);
  }
  return out;
}

namespace {

double sphere_defect(const Field& u) {
  double d = 0.0;
  for (double v : u.pointwise_norm()) d = std::max(d, std::abs(v * v - 1.0));
  return d;
}

}  // namespace

LocalRun run_local(const Field& u0, double T, double dt, const LocalRunOptions& opt) {
  if (!(T > 0.0)) throw ConfigError("run length T must be positive");
  if (opt.sample_every < 1) throw ConfigError("sample_every must be >= 1");
  u0.grid().validate();
  if (!u0.all_finite()) throw InputError("initial datum is not finite");

  LocalRun run;
  auto& diag = run.diagnostics;
  const auto norms = u0.pointwise_norm();
  diag.sphere_valued = std::all_of(norms.begin(), norms.end(), [](double v) { return std::abs(v - 1.0) <= 1e-10; });
  if (!diag.sphere_valued && u0.sup_norm() > opt.max_M)
    throw HypothesisError("initial datum violates |u| <= M with M = " + std::to_string(opt.max_M));

  const long steps = std::lround(std::ceil(T / dt - 1e-9));
  const double dt_eff = T / static_cast<double>(steps);

  auto record = [&](const Field& u, double t) {
    run.trajectory.times.push_back(t);
    run.trajectory.frames.push_back(u);
    diag.times.push_back(t);
    diag.sup_norm.push_back(u.sup_norm());
    diag.energy.push_back(dirichlet_energy(u));
    if (diag.sphere_valued) {
      diag.sphere_defect.push_back(sphere_defect(u));
      diag.max_sphere_defect = std::max(diag.max_sphere_defect, diag.sphere_defect.back());
    }
  };

  Field u = u0;
  record(u, opt.t_start);
  for (long k = 1; k <= steps; ++k) {
    u = step_local(u, dt_eff, opt.step);
    if (!u.all_finite() || u.sup_norm() > opt.divergence_limit)
      throw DivergenceError("local flow diverged at step " + std::to_string(k));
    if (k % opt.sample_every == 0 || k == steps) record(u, opt.t_start + k * dt_eff);
  }
  return run;
}

}  // namespace fhl
