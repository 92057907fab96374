#include "fhl/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "fhl/errors.hpp"
#include "fhl/harnack.hpp"

namespace fhl {

IntervalCascade interval_cascade(int K) {
  if (K < 0) throw ConfigError("interval cascade needs K >= 0");
  IntervalCascade ic;
  ic.intervals.push_back({0.0, 0.5});
  for (int k = 1; k <= K; ++k) {
    const auto [a, b] = ic.intervals.back();
    const double mid = (a + b) / 2.0;
    ic.intervals.push_back({mid, mid + (b - a) / 4.0});
  }
  return ic;
}

std::optional<double> fit_alpha(const std::vector<double>& M_k, double r) {
  if (!(r > 0.0 && r < 1.0)) throw ConfigError("fit_alpha needs r in (0, 1)");
  if (std::all_of(M_k.begin(), M_k.end(), [](double m) { return m < 1e-12; })) return std::nullopt;
  const int K = static_cast<int>(M_k.size()) - 1;
  std::vector<double> xs, ys;
  for (int k = 2; k <= K - 1; ++k) {
    if (M_k[k] < 1e-12) continue;
    xs.push_back(k * std::log(r));
    ys.push_back(std::log(M_k[k]));
  }
  if (xs.size() < 2) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

namespace {

constexpr double kTimeEps = 1e-9;

bool in_ball(const std::array<double, 2>& x, const std::array<double, 2>& c, double r, int n) {
  double d2 = 0.0;
  for (int a = 0; a < n; ++a) d2 += (x[a] - c[a]) * (x[a] - c[a]);
  return d2 <= r * r * (1.0 + 1e-12);
}

std::vector<std::size_t> frames_in(const Trajectory& traj, double lo, double hi, bool open_lo) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const bool above = open_lo ? t > lo + kTimeEps : t >= lo - kTimeEps;
    if (above && t <= hi + kTimeEps) out.push_back(i);
  }
  return out;
}

double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

CascadeReport oscillation_cascade(const Trajectory& traj, double r, double s, CascadeMode mode,
                                  const CascadeOptions& opt) {
  if (traj.size() == 0) throw InputError("empty trajectory");
  if (mode == CascadeMode::local) {
    r = 0.5;
    s = 1.0;
  }
  if (!(r > 0.0 && r < 1.0)) throw ConfigError("cascade ratio r must lie in (0, 1)");
  if (!(s > 0.0 && s <= 1.0)) throw ConfigError("cascade order s must lie in (0, 1]");
  const Grid& g = traj.grid();
  const int m = traj.m();
  for (int a = 0; a < g.n; ++a)
    if (opt.anchor_x[a] - 1.0 < -g.L / 2 || opt.anchor_x[a] + 1.0 > g.L / 2)
      throw ConfigError("B_1 around the anchor must lie inside the box");

  CascadeReport rep;
  rep.mode = mode;
  rep.r = r;
  rep.s = s;
  rep.M = traj.sup_norm();
  rep.anchor_x = opt.anchor_x;
  rep.anchor_t = opt.anchor_t;
  if (rep.M > 0.99 + 1e-12) throw HypothesisError("trajectory violates sup |u| <= 0.99");

  const auto ic = interval_cascade(opt.max_levels);
  const double t_first = traj.times.front(), t_last = traj.times.back();
  for (int k = 0; k <= opt.max_levels; ++k) {
    CascadeLevel lv;
    lv.k = k;
    lv.radius = std::pow(r, k);
    if (mode == CascadeMode::local) {
      lv.t_lo = opt.anchor_t + ic.intervals[k].a;
      lv.t_hi = opt.anchor_t + ic.intervals[k].b;
    } else {
      lv.t_lo = opt.anchor_t - std::pow(r, 2.0 * s * k);
      lv.t_hi = opt.anchor_t;
    }
    if (k == 0 && (lv.t_lo < t_first - kTimeEps || lv.t_hi > t_last + kTimeEps))
      throw ConfigError("trajectory does not cover the level-0 cylinder");
    if (lv.radius < g.h()) break;
    const auto frames = frames_in(traj, lv.t_lo, lv.t_hi, mode == CascadeMode::fractional);
    if (frames.size() < 2) break;

    std::vector<double> lo(m, std::numeric_limits<double>::infinity()), hi(m, -std::numeric_limits<double>::infinity());
    for (std::size_t p = 0; p < g.space_points(); ++p) {
      if (!in_ball(g.point(p), opt.anchor_x, lv.radius, g.n)) continue;
      ++lv.samples;
      for (std::size_t f : frames)
        for (int c = 0; c < m; ++c) {
          const double v = traj.frames[f].at(p, c);
          lo[c] = std::min(lo[c], v);
          hi[c] = std::max(hi[c], v);
        }
    }
    lv.samples *= frames.size();
    lv.rho.resize(m);
    for (int c = 0; c < m; ++c) {
      lv.rho[c] = 0.5 * (lo[c] + hi[c]);
      lv.M_k = std::max(lv.M_k, 0.5 * (hi[c] - lo[c]));
    }
    if (k > 0) lv.rho_bound_ok = vec_norm(lv.rho) + rep.levels.back().M_k <= rep.M + 1e-9;
    rep.levels.push_back(std::move(lv));
  }
  if (rep.levels.empty()) throw ConfigError("no resolvable cascade level");
  rep.max_level = rep.levels.back().k;

  std::vector<double> Ms;
  for (const auto& lv : rep.levels) Ms.push_back(lv.M_k);
  rep.degenerate = std::all_of(Ms.begin(), Ms.end(), [](double v) { return v < 1e-12; });
  rep.alpha_fit = rep.degenerate ? std::nullopt : fit_alpha(Ms, r);

  rep.delta_witness = rep.M > 0.0 ? 1.0 : 0.0;
  for (const auto& lv : rep.levels)
    if (lv.k >= 1 && rep.M > 0.0) rep.delta_witness = std::min(rep.delta_witness, 1.0 - std::pow(lv.M_k / rep.M, 1.0 / lv.k));

  if (rep.alpha_fit && rep.M > 0.0) {
    const double a = *rep.alpha_fit;
    for (std::size_t k = 0; k < rep.levels.size(); ++k)
      for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> d(m);
        for (int c = 0; c < m; ++c) d[c] = rep.levels[k].rho[c] - rep.levels[i].rho[c];
        rep.C0 = std::max(rep.C0, vec_norm(d) / (rep.M * std::pow(r, i * a)));
      }
  }

  if (mode == CascadeMode::fractional && rep.M > 0.0) {
    const double l = opt.l < 0.0 ? rep.M : opt.l;
    const double a = rep.alpha_fit.value_or(0.0);
    const Grid sg = g.spatial();
    for (auto& lv : rep.levels) {
      // h of the rescaled, recentred field with the worst-case xi, |xi| = 1 - l.
      const double Mt = std::max(lv.M_k, rep.M * std::pow(r, lv.k * a));
      const double base = 0.5 * Mt * Mt + (1.0 - l) * Mt;
      const auto tw = tail_weights(sg, opt.anchor_x, lv.radius, s);
      const double Rs = std::pow(lv.radius, 2.0 * s);
      const auto frames = frames_in(traj, opt.anchor_t - std::pow(r, 2.0 * s * (lv.k + 1)), opt.anchor_t, true);
      for (std::size_t f : frames) {
        double acc = 0.0, shell = 0.0;
        for (std::size_t p = 0; p < sg.space_points(); ++p) {
          double w2 = 0.0;
          for (int c = 0; c < m; ++c) {
            const double d = traj.frames[f].at(p, c) - lv.rho[c];
            w2 += d * d;
          }
          const double hneg = std::max(0.0, -(base - 0.5 * w2 - (1.0 - l) * std::sqrt(w2)));
          acc += tw.cell[p] * hneg;
          if (in_outer_shell(sg, p)) shell = std::max(shell, hneg);
        }
        lv.tail = std::max(lv.tail, Rs * acc);
        lv.tail_truncation = std::max(lv.tail_truncation, Rs * shell * tw.outside);
      }
      rep.tail_constant = std::max(rep.tail_constant, lv.tail / (rep.M * std::pow(r, lv.k * a)));
    }

    // Constructive centres rho'_{k+1} = rho'_k + delta ubar_k.
    const double delta = rep.delta_witness;
    std::vector<double> rho_c(m, 0.0);
    for (std::size_t k = 0; k + 1 < rep.levels.size(); ++k) {
      auto& lv = rep.levels[k];
      lv.rho_update = rho_c;
      const double rk1 = std::pow(r, k + 1.0);
      const double scale_t = std::pow(r, 2.0 * s * (k + 1.0));
      const auto frames = frames_in(traj, opt.anchor_t - 2.0 * scale_t, opt.anchor_t - 1.25 * scale_t, true);
      std::vector<double> ubar(m, 0.0);
      std::size_t count = 0;
      for (std::size_t f : frames)
        for (std::size_t p = 0; p < g.space_points(); ++p) {
          if (!in_ball(g.point(p), opt.anchor_x, rk1, g.n)) continue;
          ++count;
          for (int c = 0; c < m; ++c) ubar[c] += traj.frames[f].at(p, c) - rho_c[c];
        }
      if (count == 0) break;
      for (int c = 0; c < m; ++c) {
        ubar[c] /= static_cast<double>(count);
        rho_c[c] += delta * ubar[c];
      }
      lv.increment = delta * vec_norm(ubar);
      lv.increment_bound = delta * rep.M * std::pow(r, k * a);
      rep.update_law_ok = rep.update_law_ok && lv.increment <= lv.increment_bound * (1.0 + 1e-9);
    }
  }
  return rep;
}

HolderFit holder_fit(const CascadeReport& rep, double battery_C, double l, double slack) {
  HolderFit hf;
  hf.alpha = rep.alpha_fit;
  const double delta = rep.delta_witness;
  const double log_term = delta >= 1.0 ? std::numeric_limits<double>::infinity() : std::log(1.0 - delta) / std::log(rep.r);
  hf.al_bound = std::min(2.0 * rep.s, log_term);
  hf.al_ok = hf.alpha.has_value() && *hf.alpha <= hf.al_bound + slack;
  hf.r_admissible = battery_C * std::pow(rep.r, 2.0 * rep.s) < (1.0 - l) / 2.0;
  return hf;
}

void write_cascade_csv(const std::filesystem::path& path, const CascadeReport& rep) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  const std::size_t m = rep.levels.empty() ? 0 : rep.levels.front().rho.size();
  out << std::setprecision(17) << "row,k,radius,t_lo,t_hi,M_k";
  for (std::size_t c = 0; c < m; ++c) out << ",rho_" << c;
  out << ",samples,tail,increment,increment_bound,alpha_fit,delta_witness,r,s,anchor_x,anchor_t\n";
  for (const auto& lv : rep.levels) {
    out << "level," << lv.k << ',' << lv.radius << ',' << lv.t_lo << ',' << lv.t_hi << ',' << lv.M_k;
    for (double v : lv.rho) out << ',' << v;
    out << ',' << lv.samples << ',' << lv.tail << ',' << lv.increment << ',' << lv.increment_bound << ",,,,,,\n";
  }
  out << "summary,,,,,";
  for (std::size_t c = 0; c < m; ++c) out << ',';
  out << ",,,,,";
  if (rep.alpha_fit)
    out << *rep.alpha_fit;
  else
    out << "NA";
  out << ',' << rep.delta_witness << ',' << rep.r << ',' << rep.s << ',' << rep.anchor_x[0] << ',' << rep.anchor_t << '\n';
}

}  // namespace fhl
