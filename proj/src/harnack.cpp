#include "fhl/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fhl/errors.hpp"
#include "fhl/spectral.hpp"

namespace fhl {

bool in_audit_interior(const Grid& g, int j, std::size_t p) {
  const int margin_t = std::max(1, g.Nt / 10);
  if (j < margin_t || j >= g.Nt - margin_t) return false;
  const auto x = g.point(p);
  for (int a = 0; a < g.n; ++a)
    if (std::abs(x[a]) > 0.4 * g.L) return false;
  return true;
}

namespace {

// integral of |x - x0|^{-1-2s} over [c, d], both endpoints on the same side at distance >= R.
double kernel_integral_1d(double c, double d, double x0, double s) {
  const double u1 = std::abs(c - x0), u2 = std::abs(d - x0);
  const double near = std::min(u1, u2), far = std::max(u1, u2);
  return (std::pow(near, -2.0 * s) - std::pow(far, -2.0 * s)) / (2.0 * s);
}

double cell_weight(const Grid& g, std::size_t p, std::array<double, 2> x0, double R, double s) {
  const double h = g.h();
  const auto x = g.point(p);
  if (g.n == 1) {
    const double a = x[0] - h / 2, b = x[0] + h / 2;
    double w = 0.0;
    if (a < x0[0] - R) w += kernel_integral_1d(a, std::min(b, x0[0] - R), x0[0], s);
    if (b > x0[0] + R) w += kernel_integral_1d(std::max(a, x0[0] + R), b, x0[0], s);
    return w;
  }
  constexpr int sub = 8;
  const double hs = h / sub;
  double w = 0.0;
  for (int i = 0; i < sub; ++i)
    for (int k = 0; k < sub; ++k) {
      const double dx = x[0] - h / 2 + (i + 0.5) * hs - x0[0];
      const double dy = x[1] - h / 2 + (k + 0.5) * hs - x0[1];
      const double r = std::hypot(dx, dy);
      if (r >= R) w += hs * hs * std::pow(r, -2.0 - 2.0 * s);
    }
  return w;
}

double shell_sup_at(const SpaceTimeField& v, int j) {
  double m = 0.0;
  const Grid& g = v.grid();
  for (std::size_t p = 0; p < g.space_points(); ++p)
    if (in_outer_shell(g, p))
      for (int c = 0; c < v.m(); ++c) m = std::max(m, std::abs(v.at(j, p, c)));
  return m;
}

}  // namespace

TailWeights tail_weights(const Grid& g, std::array<double, 2> x0, double R, double s) {
  if (!(R > 0.0) || !(s > 0.0 && s < 1.0)) throw ConfigError("tail needs R > 0 and s in (0, 1)");
  for (int a = 0; a < g.n; ++a)
    if (x0[a] - R < -g.L / 2 || x0[a] + R > g.L / 2) throw ConfigError("B_R(x0) must lie inside the box");
  TailWeights tw;
  tw.cell.resize(g.space_points());
  for (std::size_t p = 0; p < tw.cell.size(); ++p) tw.cell[p] = cell_weight(g, p, x0, R, s);
  const double lo = -g.L / 2 - g.h() / 2, hi = g.L / 2 - g.h() / 2;
  if (g.n == 1) {
    tw.outside = (std::pow(x0[0] - lo, -2.0 * s) + std::pow(hi - x0[0], -2.0 * s)) / (2.0 * s);
  } else {
    double d = std::numeric_limits<double>::max();
    for (int a = 0; a < 2; ++a) d = std::min({d, x0[a] - lo, hi - x0[a]});
    tw.outside = 2.0 * std::numbers::pi * std::pow(d, -2.0 * s) / (2.0 * s);
  }
  return tw;
}

TailResult tail_infty(const SpaceTimeField& v, std::array<double, 2> x0, double R, double t1, double t2, double s) {
  const Grid& g = v.grid();
  if (!(t2 > t1)) throw ConfigError("tail_infty needs t1 < t2");
  const auto tw = tail_weights(g.spatial(), x0, R, s);
  const auto& w = tw.cell;
  const double outside = tw.outside;

  TailResult out;
  bool any = false;
  for (int j = 0; j < g.Nt; ++j) {
    const double t = g.time(j);
    if (!(t > t1 && t <= t2)) continue;
    any = true;
    double acc = 0.0;
    for (std::size_t p = 0; p < w.size(); ++p) {
      if (w[p] == 0.0) continue;
      double nrm = 0.0;
      for (int c = 0; c < v.m(); ++c) nrm += v.at(j, p, c) * v.at(j, p, c);
      acc += w[p] * std::sqrt(nrm);
    }
    out.value = std::max(out.value, acc);
    out.truncation_bound = std::max(out.truncation_bound, shell_sup_at(v, j) * outside);
  }
  if (!any) throw EmptyRegionError("no time sample in (t1, t2]");
  const double Rs = std::pow(R, 2.0 * s);
  out.value *= Rs;
  out.truncation_bound *= Rs;
  return out;
}

namespace {

double field_scale(const SpaceTimeField& v) { return std::max(v.sup_norm(), 1e-300); }

void check_nonnegative(const SpaceTimeField& v, const std::function<bool(int, std::size_t)>& where, const char* what) {
  const Grid& g = v.grid();
  const double tol = -kNegativityTolerance * field_scale(v);
  for (int j = 0; j < g.Nt; ++j)
    for (std::size_t p = 0; p < g.space_points(); ++p)
      if (where(j, p) && v.at(j, p) < tol)
        throw HypothesisError(std::string("v is negative on ") + what + " at t = " + std::to_string(g.time(j)));
}

// Fourth-order centred time differences; the two samples at each end copy
// their neighbours (never audited).
SpaceTimeField time_derivative(const SpaceTimeField& v) {
  const Grid& g = v.grid();
  SpaceTimeField d(g, v.m());
  const std::size_t row = g.space_points() * v.m();
  const double dt = g.dt();
  const auto at = [&](int j, std::size_t k) { return v.values()[j * row + k]; };
  for (int j = 2; j + 2 < g.Nt; ++j)
    for (std::size_t k = 0; k < row; ++k)
      d.values()[j * row + k] = (-at(j + 2, k) + 8.0 * at(j + 1, k) - 8.0 * at(j - 1, k) + at(j - 2, k)) / (12.0 * dt);
  for (std::size_t k = 0; k < row; ++k)
    for (int j : {0, 1}) {
      d.values()[j * row + k] = d.values()[2 * row + k];
      d.values()[(g.Nt - 1 - j) * row + k] = d.values()[(g.Nt - 3) * row + k];
    }
  return d;
}

// Applies a spatial symbol slice by slice.
SpaceTimeField spatial_apply(const SpaceTimeField& v, const SpatialSymbol& sym) {
  SpaceTimeField out(v.grid(), v.m());
  for (int j = 0; j < v.grid().Nt; ++j) out.set_slice(j, apply_multiplier(v.slice(j), sym));
  return out;
}

SpaceTimeField heat_residual(const SpaceTimeField& v) {
  auto r = time_derivative(v);
  r += spatial_apply(v, [](std::array<double, 2> k) { return cplx(k[0] * k[0] + k[1] * k[1]); });
  return r;
}

SpaceTimeField frac_heat_residual(const SpaceTimeField& v, double s) {
  auto r = time_derivative(v);
  r += spatial_apply(v, [s](std::array<double, 2> k) { return cplx(std::pow(k[0] * k[0] + k[1] * k[1], s)); });
  return r;
}

double min_over(const SpaceTimeField& r, const std::function<bool(int, std::size_t)>& where) {
  const Grid& g = r.grid();
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.Nt; ++j)
    for (std::size_t p = 0; p < g.space_points(); ++p)
      if (where(j, p)) m = std::min(m, r.at(j, p));
  return std::isfinite(m) ? m : 0.0;
}

double safe_ratio(double num, double den) {
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

bool in_ball(const Grid& g, std::size_t p, std::array<double, 2> x0, double r) {
  const auto x = g.point(p);
  double d2 = 0.0;
  for (int a = 0; a < g.n; ++a) d2 += (x[a] - x0[a]) * (x[a] - x0[a]);
  return d2 <= r * r;
}

void require_scalar_time(const SpaceTimeField& v) {
  v.grid().validate();
  if (!v.grid().has_time()) throw ConfigError("Harnack reports need a space-time field");
  if (v.m() != 1) throw ConfigError("Harnack reports need a scalar field");
  if (!v.all_finite()) throw InputError("field is not finite");
}

}  // namespace

HarnackReport harnack_report_local(const SpaceTimeField& v) {
  require_scalar_time(v);
  const Grid& g = v.grid();
  HarnackReport rep;
  rep.theorem_id = "local";
  rep.minus = Cylinder{{0.0, 0.0}, 1.0, -1.0, -1.0 / 3.0};
  rep.plus = Cylinder{{0.0, 0.0}, 1.0, 0.0, 0.5};
  rep.r = 1.0;
  check_nonnegative(
      v, [&](int j, std::size_t p) { return in_ball(g, p, {0.0, 0.0}, 1.0) && g.time(j) > -1.0 && g.time(j) <= 0.5; },
      "B_1 x (-1, 1/2)");
  rep.l1_avg = region_stats(v, rep.minus).l1_avg;
  rep.inf_plus = region_stats(v, rep.plus).inf;
  rep.ratio = safe_ratio(rep.l1_avg, rep.inf_plus);
  const auto res = heat_residual(v);
  rep.residual_audit = min_over(res, [&](int j, std::size_t p) { return in_audit_interior(g, j, p); }) / field_scale(v);
  rep.audit_ok = rep.residual_audit >= -kAuditTolerance;
  return rep;
}

HarnackReport harnack_report_fractional(const SpaceTimeField& v, std::array<double, 2> x0, double t0, double r,
                                        double R, double s) {
  require_scalar_time(v);
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional report needs s in (0, 1)");
  if (!(r > 0.0) || !(r < R / 2.0)) throw ConfigError("fractional report needs 0 < r < R/2");
  const Grid& g = v.grid();
  const double r2s = std::pow(r, 2.0 * s);
  const double t_lo = t0 - 2.0 * r2s;
  HarnackReport rep;
  rep.theorem_id = "fractional";
  rep.s = s;
  rep.r = r;
  rep.R = R;
  rep.minus = Cylinder{x0, r, t_lo, t0 - r2s};
  rep.plus = Cylinder{x0, r, t0 - r2s / 2.0, t0};
  const auto hull = [&](int j, std::size_t p) { return in_ball(g, p, x0, R) && g.time(j) > t_lo && g.time(j) <= t0; };
  check_nonnegative(v, hull, "B_R x (t0 - 2r^{2s}, t0]");

  rep.l1_avg = region_stats(v, rep.minus).l1_avg;
  rep.inf_plus = region_stats(v, rep.plus).inf;
  SpaceTimeField neg(g, 1);
  for (std::size_t k = 0; k < neg.values().size(); ++k) neg.values()[k] = std::max(-v.values()[k], 0.0);
  const auto tail = tail_infty(neg, x0, R, t_lo, t0, s);
  rep.tail = tail.value;
  rep.truncation_bound = tail.truncation_bound;
  rep.tail_term = std::pow(r / R, 2.0 * s) * rep.tail;
  rep.ratio = safe_ratio(rep.l1_avg, rep.inf_plus + rep.tail_term);

  const auto res = frac_heat_residual(v, s);
  const int margin = 2;
  rep.residual_audit =
      min_over(res, [&](int j, std::size_t p) { return hull(j, p) && j >= margin && j + margin < g.Nt; }) /
      field_scale(v);
  rep.audit_ok = rep.residual_audit >= -kAuditTolerance;
  return rep;
}

HarnackReport harnack_report_master(const SpaceTimeField& v, double s, History history) {
  require_scalar_time(v);
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("master report needs s in (0, 1)");
  const Grid& g = v.grid();
  HarnackReport rep;
  rep.theorem_id = "master";
  rep.s = s;
  rep.r = 0.5;
  rep.minus = Cylinder{{0.0, 0.0}, 0.5, -1.0, -0.5};
  rep.plus = Cylinder{{0.0, 0.0}, 0.5, -0.25, 0.0};
  check_nonnegative(v, [](int, std::size_t) { return true; }, "the window");

  rep.l1_avg = region_stats(v, rep.minus).integral;
  rep.inf_plus = region_stats(v, rep.plus).inf;
  rep.ratio = safe_ratio(rep.l1_avg, rep.inf_plus);

  const auto hv = hs_apply(v, s, {TimeMode::causal, 0.0, history});
  rep.residual_audit = min_over(hv, [&](int j, std::size_t p) { return in_audit_interior(g, j, p); }) / field_scale(v);
  rep.audit_ok = rep.residual_audit >= -kAuditTolerance;

  // (wk): v(xi, t) against the integral over {|x - xi| < 1/2, 1/4 < t - tau < 1/2}.
  rep.wk_ratio = std::numeric_limits<double>::infinity();
  for (double xi : {-0.25, 0.0, 0.25})
    for (double tb : {-0.2, -0.1, 0.0}) {
      int jb = 0;
      for (int j = 0; j < g.Nt; ++j)
        if (std::abs(g.time(j) - tb) < std::abs(g.time(jb) - tb)) jb = j;
      std::size_t pb = 0;
      for (std::size_t p = 0; p < g.space_points(); ++p)
        if (std::abs(g.point(p)[0] - xi) + (g.n == 2 ? std::abs(g.point(p)[1]) : 0.0) <
            std::abs(g.point(pb)[0] - xi) + (g.n == 2 ? std::abs(g.point(pb)[1]) : 0.0))
          pb = p;
      const double tj = g.time(jb);
      const auto st = region_stats(v, Cylinder{g.point(pb), 0.5, tj - 0.5, tj - 0.25});
      rep.wk_ratio = std::min(rep.wk_ratio, safe_ratio(v.at(jb, pb), st.integral));
    }
  return rep;
}

}  // namespace fhl
