#include "fhl/fractional_ops.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "fhl/errors.hpp"
#include "fhl/spectral.hpp"

namespace fhl {

double default_c_norm(double s, int n) {
  const double half_n = 0.5 * n;
  return std::pow(4.0, s) * std::tgamma(half_n + s) / (std::pow(std::numbers::pi, half_n) * std::abs(std::tgamma(-s)));
}

FracParams FracParams::make(double s, int n) {
  FracParams p;
  p.s = s;
  p.a = 1.0 - 2.0 * s;
  if (s > 0.0 && s < 1.0) p.c_norm = default_c_norm(s, n);
  p.validate();
  return p;
}

void FracParams::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional order s must lie in (0, 1)");
  if (a != 1.0 - 2.0 * s) throw ConfigError("extension weight must equal 1 - 2s");
  if (!(c_norm > 0.0) || !std::isfinite(c_norm)) throw ConfigError("kernel normalization must be positive");
}

Field frac_laplacian_spectral(const Field& u, const FracParams& p) {
  p.validate();
  const double s = p.s;
  return apply_multiplier(u, [s](std::array<double, 2> k) {
    const double k2 = k[0] * k[0] + k[1] * k[1];
    return cplx(k2 == 0.0 ? 0.0 : std::pow(k2, s));
  });
}

namespace {

void require_1d(const Grid& g) {
  if (g.n != 1) throw ConfigError("quadrature forms of (-Delta)^s are implemented for n = 1 only");
}

struct GslErrorsOff {
  GslErrorsOff() { gsl_set_error_handler_off(); }
};
const GslErrorsOff gsl_errors_off;

}  // namespace

LatticeKernel LatticeKernel::build(const Grid& g, const FracParams& p) {
  p.validate();
  require_1d(g);
  const int N = g.N;
  const double s = p.s;
  const double h = g.h();
  LatticeKernel k{g.spatial(), p, std::vector<double>(N, 0.0), 0.0};
  const double pref = p.c_norm * h * std::pow(h * N, -1.0 - 2.0 * s);
  for (int r = 1; r < N; ++r) {
    const double q = static_cast<double>(r) / N;
    k.weights[r] = pref * (gsl_sf_hzeta(1.0 + 2.0 * s, q) + gsl_sf_hzeta(1.0 + 2.0 * s, 1.0 - q));
  }
  // Near-field corrections: -zeta(2s-1) h^{2-2s} (-Delta_h) and
  // (zeta(2s-3) - zeta(2s-1))/12 h^{4-2s} Delta_h^2, written as kernel weights.
  const double hs = p.c_norm * std::pow(h, -2.0 * s);
  const double z1 = gsl_sf_zeta(2.0 * s - 1.0);
  const double z3 = gsl_sf_zeta(2.0 * s - 3.0);
  const double c2 = -z1 * hs;
  const double c4 = (z3 - z1) / 12.0 * hs;
  k.weights[1] += c2 + 4.0 * c4;
  k.weights[N - 1] += c2 + 4.0 * c4;
  k.weights[2] -= c4;
  k.weights[N - 2] -= c4;
  return k;
}

double LatticeKernel::symbol(int i) const {
  const int N = grid.N;
  double acc = 0.0;
  for (int r = 1; r < N; ++r) acc += weights[r] * (1.0 - std::cos(2.0 * std::numbers::pi * i * r / N));
  return acc;
}

Field apply_lattice(const Field& u, const LatticeKernel& k) {
  if (!u.grid().same_space(k.grid)) throw GridMismatchError("field and lattice kernel grids differ");
  const int N = k.grid.N;
  const int m = u.m();
  Field out(u.grid(), m);
  for (int i = 0; i < N; ++i)
    for (int c = 0; c < m; ++c) {
      const double ui = u.at(i, c);
      double acc = 0.0;
      for (int r = 1; r < N; ++r) acc += k.weights[r] * (ui - u.at((i + r) % N, c));
      out.at(i, c) = acc;
    }
  return out;
}

Field frac_laplacian_quadrature(const Field& u, const FracParams& p) {
  return apply_lattice(u, LatticeKernel::build(u.grid(), p));
}

Field bilinear_B(const Field& u, const Field& w, const LatticeKernel& k) {
  if (!(u.grid() == w.grid()) || u.m() != w.m()) throw GridMismatchError("bilinear_B needs fields on the same grid");
  if (!u.grid().same_space(k.grid)) throw GridMismatchError("field and lattice kernel grids differ");
  const int N = k.grid.N;
  const int m = u.m();
  Field out(u.grid().spatial(), 1);
  for (int i = 0; i < N; ++i) {
    double acc = 0.0;
    for (int r = 1; r < N; ++r) {
      const int j = (i + r) % N;
      double dot = 0.0;
      for (int c = 0; c < m; ++c) dot += (u.at(i, c) - u.at(j, c)) * (w.at(i, c) - w.at(j, c));
      acc += k.weights[r] * dot;
    }
    out.at(i, 0) = 0.5 * acc;
  }
  return out;
}

TrigInterpolant::TrigInterpolant(const Grid& g, std::span<const double> data) : L_(g.L) {
  require_1d(g);
  const int N = g.N;
  std::vector<cplx> buf(data.begin(), data.end());
  const int dims[1] = {N};
  fft_forward(buf, dims);
  mean_ = buf[0].real() / N;
  a_.assign(N / 2, 0.0);
  b_.assign(N / 2, 0.0);
  for (int k = 1; k < N / 2; ++k) {
    a_[k - 1] = 2.0 * buf[k].real() / N;
    b_[k - 1] = -2.0 * buf[k].imag() / N;
  }
  a_[N / 2 - 1] = buf[N / 2].real() / N;
}

double TrigInterpolant::operator()(double x) const {
  const double theta = 2.0 * std::numbers::pi * (x + 0.5 * L_) / L_;
  const cplx step(std::cos(theta), std::sin(theta));
  cplx e = step;
  double acc = mean_;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    acc += a_[k] * e.real() + b_[k] * e.imag();
    e *= step;
  }
  return acc;
}

namespace {

struct ContinuumB {
  const FracParams& p;
  double L, h;
  std::vector<TrigInterpolant> u, w;
  std::vector<double> u_far, w_far;  // outer-shell means

  ContinuumB(const Field& uf, const Field& wf, const FracParams& params) : p(params), L(uf.grid().L), h(uf.grid().h()) {
    const Grid& g = uf.grid();
    for (int c = 0; c < uf.m(); ++c) {
      const auto uc = uf.component(c);
      const auto wc = wf.component(c);
      u.emplace_back(g, uc);
      w.emplace_back(g, wc);
      double su = 0.0, sw = 0.0;
      int cnt = 0;
      for (std::size_t q = 0; q < uc.size(); ++q)
        if (in_outer_shell(g, q)) {
          su += uc[q];
          sw += wc[q];
          ++cnt;
        }
      u_far.push_back(su / cnt);
      w_far.push_back(sw / cnt);
    }
  }

  double at(double x) const {
    const std::size_t m = u.size();
    std::vector<double> ux(m), wx(m);
    double far = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      ux[c] = u[c](x);
      wx[c] = w[c](x);
      far += (ux[c] - u_far[c]) * (wx[c] - w_far[c]);
    }
    const double s = p.s;
    struct Ctx {
      const ContinuumB* self;
      const std::vector<double>* ux;
      const std::vector<double>* wx;
      double x;
    } ctx{this, &ux, &wx, x};
    gsl_function fn;
    fn.params = &ctx;
    fn.function = [](double y, void* vp) -> double {
      const auto* c = static_cast<const Ctx*>(vp);
      const double d = std::abs(c->x - y);
      if (d == 0.0) return 0.0;
      double dot = 0.0;
      for (std::size_t k = 0; k < c->ux->size(); ++k)
        dot += ((*c->ux)[k] - c->self->u[k](y)) * ((*c->wx)[k] - c->self->w[k](y));
      return dot / std::pow(d, 1.0 + 2.0 * c->self->p.s);
    };
    constexpr std::size_t kLimit = 2000;
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
        gsl_integration_workspace_alloc(kLimit), &gsl_integration_workspace_free);
    double left = 0.0, right = 0.0, err = 0.0;
    // Union of grid cells [-L/2 - h/2, L/2 - h/2); outside it the field equals its outer-shell mean.
    const double lo = -0.5 * L - 0.5 * h, hi = 0.5 * L - 0.5 * h;
    if (!(x > lo && x < hi)) throw ConfigError("continuum B evaluated outside the box");
    gsl_integration_qags(&fn, lo, x, 1e-14, 1e-11, kLimit, ws.get(), &left, &err);
    gsl_integration_qags(&fn, x, hi, 1e-14, 1e-11, kLimit, ws.get(), &right, &err);
    const double ext = (std::pow(hi - x, -2.0 * s) + std::pow(x - lo, -2.0 * s)) / (2.0 * s);
    return 0.5 * p.c_norm * (left + right + far * ext);
  }
};

}  // namespace

double bilinear_B_at(const Field& u, const Field& w, const FracParams& p, double x) {
  p.validate();
  require_1d(u.grid());
  if (!(u.grid() == w.grid()) || u.m() != w.m()) throw GridMismatchError("bilinear_B needs fields on the same grid");
  return ContinuumB(u, w, p).at(x);
}

Field bilinear_B(const Field& u, const Field& w, const FracParams& p, BMode mode) {
  if (!(u.grid() == w.grid()) || u.m() != w.m()) throw GridMismatchError("bilinear_B needs fields on the same grid");
  if (mode == BMode::kernel_consistent) return bilinear_B(u, w, LatticeKernel::build(u.grid(), p));
  p.validate();
  require_1d(u.grid());
  const ContinuumB cb(u, w, p);
  Field out(u.grid().spatial(), 1);
  for (std::size_t i = 0; i < out.points(); ++i) out.at(i, 0) = cb.at(u.grid().point(i)[0]);
  return out;
}

namespace {

Field square(const Field& u) {
  Field out(u.grid(), 1);
  for (std::size_t i = 0; i < u.points(); ++i) out.at(i, 0) = u.at(i, 0) * u.at(i, 0);
  return out;
}

}  // namespace

double carre_du_champ_residual(const Field& u, const FracParams& p) {
  if (u.m() != 1) throw ConfigError("carre du champ identity needs a scalar field");
  const auto k = LatticeKernel::build(u.grid(), p);
  const Field lu2 = apply_lattice(square(u), k);
  const Field lu = apply_lattice(u, k);
  const Field b = bilinear_B(u, u, k);
  double res = 0.0;
  for (std::size_t i = 0; i < u.points(); ++i)
    res = std::max(res, std::abs(lu2.at(i, 0) - 2.0 * u.at(i, 0) * lu.at(i, 0) + 2.0 * b.at(i, 0)));
  return res;
}

CarreDuChampReport carre_du_champ_continuum(const Field& u, const FracParams& p) {
  if (u.m() != 1) throw ConfigError("carre du champ identity needs a scalar field");
  const Field lu2 = frac_laplacian_spectral(square(u), p);
  const Field lu = frac_laplacian_spectral(u, p);
  const Field b = bilinear_B(u, u, p, BMode::continuum_quadrature);
  CarreDuChampReport rep;
  for (std::size_t i = 0; i < u.points(); ++i) {
    const double a1 = lu2.at(i, 0), a2 = 2.0 * u.at(i, 0) * lu.at(i, 0), a3 = 2.0 * b.at(i, 0);
    rep.residual = std::max(rep.residual, std::abs(a1 - a2 + a3));
    rep.scale = std::max({rep.scale, std::abs(a1), std::abs(a2), std::abs(a3)});
  }
  return rep;
}

double scaling_check(const Field& u, double lambda, const FracParams& p) {
  p.validate();
  require_1d(u.grid());
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("scaling factor lambda must lie in (0, 1]");
  if (lambda == 1.0) return 0.0;
  const Grid& g = u.grid();
  std::vector<TrigInterpolant> interp;
  for (int c = 0; c < u.m(); ++c) interp.emplace_back(g, u.component(c));
  Field ul = Field::sample(g, u.m(), [&](std::array<double, 2> x, std::span<double> out) {
    for (int c = 0; c < u.m(); ++c) out[c] = interp[c](lambda * x[0]);
  });
  // The far field is the outer-shell mean, so the gate applies to the deviation from it.
  Field dev = ul;
  for (int c = 0; c < u.m(); ++c) {
    double mean = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.space_points(); ++i)
      if (in_outer_shell(g, i)) {
        mean += ul.at(i, c);
        ++count;
      }
    mean /= static_cast<double>(count);
    for (std::size_t i = 0; i < g.space_points(); ++i) dev.at(i, c) -= mean;
  }
  if (!decay_gate(dev).passed) throw ConfigError("rescaled field is not resolvable on the box (decay gate fails)");
  const ContinuumB bl(ul, ul, p);
  const ContinuumB b(u, u, p);
  const double fac = std::pow(lambda, 2.0 * p.s);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.points(); ++i) {
    const double x = g.point(i)[0];
    const double lhs = bl.at(x);
    const double rhs = fac * b.at(lambda * x);
    num = std::max(num, std::abs(lhs - rhs));
    den = std::max(den, std::abs(rhs));
  }
  return den == 0.0 ? num : num / den;
}

}  // namespace fhl
