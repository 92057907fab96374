#include "fhl/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fhl/errors.hpp"

namespace fhl {

namespace {

double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

}  // namespace

double cell_fraction_in_ball(const Grid& g, std::size_t p, std::array<double, 2> x0, double r) {
  const double h = g.h();
  const auto x = g.point(p);
  if (g.n == 1) return overlap(x[0] - 0.5 * h, x[0] + 0.5 * h, x0[0] - r, x0[0] + r) / h;
  // 2-D: exact for cells far from the circle, 8x8 supersampling near it.
  const double d = std::hypot(x[0] - x0[0], x[1] - x0[1]);
  const double half_diag = 0.7072 * h;
  if (d + half_diag <= r) return 1.0;
  if (d - half_diag >= r) return 0.0;
  int inside = 0;
  constexpr int kSub = 8;
  for (int a = 0; a < kSub; ++a)
    for (int b = 0; b < kSub; ++b) {
      const double xa = x[0] - 0.5 * h + (a + 0.5) * h / kSub;
      const double xb = x[1] - 0.5 * h + (b + 0.5) * h / kSub;
      if (std::hypot(xa - x0[0], xb - x0[1]) < r) ++inside;
    }
  return static_cast<double>(inside) / (kSub * kSub);
}

double cell_fraction_in_interval(const Grid& g, int j, double lo, double hi) {
  const double dt = g.dt();
  const double t = g.time(j);
  return overlap(t - 0.5 * dt, t + 0.5 * dt, lo, hi) / dt;
}

RegionStats region_stats(const SpaceTimeField& f, const Cylinder& q) {
  q.validate();
  if (f.m() != 1) throw ConfigError("region_stats needs a scalar field");
  const Grid& g = f.grid();
  const std::size_t ns = g.space_points();
  constexpr double kEdge = 1e-12;

  std::vector<double> wx(ns);
  std::vector<char> cx(ns);
  for (std::size_t p = 0; p < ns; ++p) {
    wx[p] = cell_fraction_in_ball(g, p, q.x0, q.r);
    const auto x = g.point(p);
    cx[p] = std::hypot(x[0] - q.x0[0], x[1] - q.x0[1]) <= q.r * (1 + kEdge);
  }

  RegionStats st;
  st.inf = std::numeric_limits<double>::infinity();
  st.sup = -std::numeric_limits<double>::infinity();
  double wsum = 0.0;
  double acc = 0.0;
  for (int j = 0; j < g.Nt; ++j) {
    const double wt = cell_fraction_in_interval(g, j, q.t_lo, q.t_hi);
    const double t = g.time(j);
    const bool ct = t >= q.t_lo - kEdge && t <= q.t_hi + kEdge;
    if (wt <= 0.0 && !ct) continue;
    for (std::size_t p = 0; p < ns; ++p) {
      const double v = f.at(j, p);
      const double w = wt * wx[p];
      wsum += w;
      acc += w * v;
      if (ct && cx[p]) {
        st.inf = std::min(st.inf, v);
        st.sup = std::max(st.sup, v);
        ++st.samples;
      }
    }
  }
  if (st.samples == 0 || wsum <= 0.0) throw EmptyRegionError("cylinder contains no grid sample");
  const double cell = (g.n == 1 ? g.h() : g.h() * g.h()) * g.dt();
  st.integral = acc * cell;
  st.l1_avg = acc / wsum;
  return st;
}

}  // namespace fhl
