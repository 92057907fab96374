#include "fhl/fractional_flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include "fhl/errors.hpp"
#include "fhl/spectral.hpp"

namespace fhl {

NonlocalRHS frac_harmonic_rhs(double M) {
  NonlocalRHS f;
  f.a_growth = M;
  f.l = M * M;
  f.rhs = [](std::array<double, 2>, std::span<const double> u, double b, std::span<double> out) {
    for (std::size_t c = 0; c < u.size(); ++c) out[c] = u[c] * b;
  };
  return f;
}

NonlocalRHS zero_rhs() {
  NonlocalRHS f;
  f.a_growth = 0.0;
  f.l = 0.0;
  f.rhs = [](std::array<double, 2>, std::span<const double>, double, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  return f;
}

namespace {

struct Hits {
  std::size_t growth = 0, aligned = 0;
  double growth_ratio = 0.0, aligned_ratio = 0.0;
};

void check_point(const NonlocalRHS& f, std::array<double, 2> x, std::span<const double> u, double b,
                 std::vector<double>& out, Hits& h) {
  f.rhs(x, u, b, out);
  double fn = 0.0, uf = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    fn += out[c] * out[c];
    uf += u[c] * out[c];
  }
  fn = std::sqrt(fn);
  const double slack = 1e-12 * (1.0 + std::abs(b));
  if (fn > f.a_growth * b + slack) ++h.growth;
  if (uf > f.l * b + slack) ++h.aligned;
  if (b > 0.0) {
    h.growth_ratio = std::max(h.growth_ratio, fn / b);
    h.aligned_ratio = std::max(h.aligned_ratio, uf / b);
  }
}

Hits check_field(const NonlocalRHS& f, const Field& u, const Field& b) {
  Hits h;
  std::vector<double> out(u.m()), uu(u.m());
  for (std::size_t p = 0; p < u.points(); ++p) {
    for (int c = 0; c < u.m(); ++c) uu[c] = u.at(p, c);
    check_point(f, u.grid().point(p), uu, b.at(p, 0), out, h);
  }
  return h;
}

}  // namespace

ValidatorReport validate_nonlocal(const NonlocalRHS& f, const Field& u, const LatticeKernel& k, double radius,
                                  std::size_t random_samples, std::uint64_t seed) {
  if (!f.rhs) throw ConfigError("nonlocal rhs has no callable");
  const Field b = bilinear_B(u, u, k);
  Hits h = check_field(f, u, b);
  const int m = u.m();
  std::vector<double> out(m), uu(m);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t s = 0; s < random_samples; ++s) {
    double nrm = 0.0;
    for (int c = 0; c < m; ++c) {
      uu[c] = normal(rng);
      nrm += uu[c] * uu[c];
    }
    const double r = radius * std::pow(unif(rng), 1.0 / m) / std::max(std::sqrt(nrm), 1e-300);
    for (int c = 0; c < m; ++c) uu[c] *= r;
    const double bv = 100.0 * unif(rng);
    check_point(f, {(unif(rng) - 0.5) * u.grid().L, 0.0}, uu, bv, out, h);
  }
  ValidatorReport rep;
  rep.samples = u.points() + random_samples;
  rep.growth_violations = h.growth;
  rep.aligned_violations = h.aligned;
  rep.max_growth_ratio = h.growth_ratio;
  rep.max_aligned_ratio = h.aligned_ratio;
  return rep;
}

double fractional_dt_max(const Grid& g, const FracParams& p, double safety) {
  return std::min(1e-3, std::pow(g.h(), 2.0 * p.s) / 4.0) * safety;
}

namespace {

Field implicit_solve(const Field& rhs, double dt, double s) {
  return apply_multiplier(rhs, [dt, s](std::array<double, 2> kap) {
    const double k2 = kap[0] * kap[0] + kap[1] * kap[1];
    return cplx(1.0 / (1.0 + dt * std::pow(k2, s)), 0.0);
  });
}

Field explicit_term(const Field& u, const Field& b, const NonlocalRHS& f) {
  Field out(u.grid(), u.m());
  std::vector<double> uu(u.m()), o(u.m());
  for (std::size_t p = 0; p < u.points(); ++p) {
    for (int c = 0; c < u.m(); ++c) uu[c] = u.at(p, c);
    f.rhs(u.grid().point(p), uu, b.at(p, 0), o);
    for (int c = 0; c < u.m(); ++c) out.at(p, c) = o[c];
  }
  return out;
}

}  // namespace

Field step_fractional(const Field& u, double dt, const LatticeKernel& k, const NonlocalRHS* rhs, double safety) {
  if (!(dt > 0.0) || dt > fractional_dt_max(u.grid(), k.params, safety) * (1.0 + 1e-12))
    throw ConfigError("time step outside stability policy min(1e-3, h^{2s}/4)");
  Field next = u;
  if (rhs) {
    const Field b = bilinear_B(u, u, k);
    Field f = explicit_term(u, b, *rhs);
    f *= dt;
    next += f;
  }
  return implicit_solve(next, dt, k.params.s);
}

Field step_fractional(const Field& u, double dt, const FracParams& p) {
  const auto k = LatticeKernel::build(u.grid(), p);
  const auto rhs = frac_harmonic_rhs(u.sup_norm());
  return step_fractional(u, dt, k, &rhs);
}

std::size_t BStats::total_hits() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < h11_hits.size(); ++i) t += h11_hits[i] + h12_hits[i];
  return t;
}

FractionalRun run_fractional(const Field& u0, double T, double dt, const FracParams& p, const NonlocalRHS& rhs,
                             const FractionalRunOptions& opt) {
  if (!(T > 0.0)) throw ConfigError("run length T must be positive");
  if (opt.sample_every < 1) throw ConfigError("sample_every must be >= 1");
  if (!rhs.rhs) throw ConfigError("nonlocal rhs has no callable");
  p.validate();
  u0.grid().validate();
  if (!u0.all_finite()) throw InputError("initial datum is not finite");
  if (u0.sup_norm() > opt.max_M)
    throw HypothesisError("initial datum violates |u| <= M with M = " + std::to_string(opt.max_M));

  const auto kernel = LatticeKernel::build(u0.grid(), p);
  const long steps = std::lround(std::ceil(T / dt - 1e-9));
  const double dt_eff = T / static_cast<double>(steps);

  FractionalRun run;
  auto& st = run.stats;
  auto record_stats = [&](const Field& u, const Field& b, double t) {
    const Hits h = check_field(rhs, u, b);
    st.times.push_back(t);
    st.sup_norm.push_back(u.sup_norm());
    double bmax = 0.0, bsum = 0.0;
    for (double v : b.values()) {
      bmax = std::max(bmax, v);
      bsum += v;
    }
    st.b_max.push_back(bmax);
    st.b_mean.push_back(bsum / static_cast<double>(b.points()));
    st.h11_hits.push_back(h.growth);
    st.h12_hits.push_back(h.aligned);
  };

  Field u = u0;
  run.trajectory.times.push_back(opt.t_start);
  run.trajectory.frames.push_back(u);
  for (long k = 1; k <= steps; ++k) {
    if (!(dt_eff > 0.0) || dt_eff > fractional_dt_max(u.grid(), p, opt.safety) * (1.0 + 1e-12))
      throw ConfigError("time step outside stability policy min(1e-3, h^{2s}/4)");
    const Field b = bilinear_B(u, u, kernel);
    record_stats(u, b, opt.t_start + (k - 1) * dt_eff);
    Field f = explicit_term(u, b, rhs);
    f *= dt_eff;
    u += f;
    u = implicit_solve(u, dt_eff, p.s);
    if (!u.all_finite() || u.sup_norm() > opt.divergence_limit)
      throw DivergenceError("fractional flow diverged at step " + std::to_string(k));
    if (k % opt.sample_every == 0 || k == steps) {
      run.trajectory.times.push_back(opt.t_start + k * dt_eff);
      run.trajectory.frames.push_back(u);
    }
  }
  record_stats(u, bilinear_B(u, u, kernel), opt.t_start + steps * dt_eff);
  return run;
}

void write_bstats_csv(const std::filesystem::path& path, const BStats& st) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << std::setprecision(17) << "time,sup_norm,b_max,b_mean,h11_hits,h12_hits\n";
  for (std::size_t i = 0; i < st.times.size(); ++i)
    out << st.times[i] << ',' << st.sup_norm[i] << ',' << st.b_max[i] << ',' << st.b_mean[i] << ','
        << st.h11_hits[i] << ',' << st.h12_hits[i] << '\n';
}

}  // namespace fhl
