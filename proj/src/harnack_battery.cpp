#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>

#include "fhl/errors.hpp"
#include "fhl/harnack.hpp"
#include "fhl/spectral.hpp"

namespace fhl {

SpaceTimeField space_time_from(const std::vector<Field>& frames, double dt) {
  if (frames.size() < 8 || frames.size() % 2 != 0) throw ConfigError("space_time_from needs an even count >= 8 of frames");
  const Grid& sg = frames.front().grid();
  const int Nt = static_cast<int>(frames.size());
  const Grid g = Grid::space_time(sg.n, sg.N, sg.L, Nt, dt * Nt);
  SpaceTimeField out(g, frames.front().m());
  for (int j = 0; j < Nt; ++j) {
    if (!frames[j].grid().same_space(sg) || frames[j].m() != out.m()) throw GridMismatchError("frames differ in grid");
    out.set_slice(j, frames[j]);
  }
  return out;
}

CaffarelliResult caffarelli_h(const SpaceTimeField& u, std::array<double, 3> xi, double M, double l, FlowKind kind,
                              double s) {
  const Grid& g = u.grid();
  if (u.m() > 3) throw ConfigError("caffarelli_h supports m <= 3");
  const double xin = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  if (xin > (1.0 - l) + 1e-12) throw HypothesisError("|xi| exceeds 1 - l");
  if (u.sup_norm() > M + 1e-12) throw HypothesisError("sup |u| exceeds M");

  CaffarelliResult out;
  out.h = SpaceTimeField(g, 1);
  const int m = u.m();
  const double base = 0.5 * M * M + (1.0 - l) * M;
  for (std::size_t k = 0; k < g.points(); ++k) {
    double sq = 0.0, dot = 0.0;
    for (int c = 0; c < m; ++c) {
      const double uc = u.values()[k * m + c];
      sq += uc * uc;
      dot += xi[c] * uc;
    }
    out.h.values()[k] = base - 0.5 * sq - dot;
  }
  out.h_min = *std::min_element(out.h.values().begin(), out.h.values().end());

  SpaceTimeField res(g, 1);
  const std::size_t ns = g.space_points();
  const double dt = g.dt();
  for (int j = 1; j + 1 < g.Nt; ++j) {
    const Field lap = kind == FlowKind::local
                          ? apply_multiplier(out.h.slice(j), [](std::array<double, 2> k) { return cplx(k[0] * k[0] + k[1] * k[1]); })
                          : apply_multiplier(out.h.slice(j), [s](std::array<double, 2> k) {
                              return cplx(std::pow(k[0] * k[0] + k[1] * k[1], s));
                            });
    for (std::size_t p = 0; p < ns; ++p)
      res.at(j, p) = (out.h.at(j + 1, p) - out.h.at(j - 1, p)) / (2.0 * dt) + lap.at(p, 0);
  }
  out.scale = std::max(out.h.sup_norm(), 1e-300);
  double rmin = std::numeric_limits<double>::infinity();
  for (int j = 1; j + 1 < g.Nt; ++j)
    for (std::size_t p = 0; p < ns; ++p)
      if (in_audit_interior(g, j, p)) rmin = std::min(rmin, res.at(j, p));
  out.residual_min = (std::isfinite(rmin) ? rmin : 0.0) / out.scale;
  out.ok = out.h_min >= -1e-12 * out.scale && out.residual_min >= -kAuditTolerance;
  return out;
}

namespace {

double gauss_heat(double x, double tau) { return std::exp(-x * x / (4.0 * tau)) / std::sqrt(4.0 * std::numbers::pi * tau); }

// Heat kernel on the circle of length L (sum of images).
double periodic_heat(double x, double tau, double L) {
  double acc = 0.0;
  for (int k = -6; k <= 6; ++k) acc += gauss_heat(x + k * L, tau);
  return acc;
}

// Exact evolution of spatial data under the multiplier exp(-(t - t_s) sym(kappa)).
SpaceTimeField evolve(const Grid& g, const Field& data, const std::function<double(double)>& sym_of_k2) {
  SpaceTimeField out(g, 1);
  const double ts = g.time(0);
  for (int j = 0; j < g.Nt; ++j) {
    const double dt = g.time(j) - ts;
    out.set_slice(j, apply_multiplier(data, [&](std::array<double, 2> k) {
                    return cplx(std::exp(-dt * sym_of_k2(k[0] * k[0] + k[1] * k[1])));
                  }));
  }
  return out;
}

// Implicit-Euler heat steps from the first sample (discrete caloric function).
SpaceTimeField discrete_caloric(const Grid& g, Field cur) {
  SpaceTimeField out(g, 1);
  const double dt = g.dt();
  for (int j = 0; j < g.Nt; ++j) {
    out.set_slice(j, cur);
    cur = apply_multiplier(cur, [dt](std::array<double, 2> k) { return cplx(1.0 / (1.0 + dt * (k[0] * k[0] + k[1] * k[1]))); });
  }
  return out;
}

BatteryMember member(std::string id, SpaceTimeField v, History h = History::caloric) {
  return BatteryMember{std::move(id), std::move(v), h};
}

}  // namespace

Battery build_battery(const std::string& theorem_id, double s, int N) {
  Battery b;
  b.battery_id = kBatteryVersion;
  b.theorem_id = theorem_id;
  b.N = N;
  if (theorem_id == "local") {
    b.s = 1.0;
    const Grid g = Grid::space_time(1, N, 8.0, 128, 3.0);
    g.validate();
    const double L = g.L;
    b.members.push_back(member("const", SpaceTimeField::scalar(g, [](auto, double) { return 1.0; })));
    b.members.push_back(member("heat-0", SpaceTimeField::scalar(g, [L](auto x, double t) { return periodic_heat(x[0], t + 2.0, L); })));
    b.members.push_back(
        member("heat-shift", SpaceTimeField::scalar(g, [L](auto x, double t) { return periodic_heat(x[0] - 0.75, t + 2.0, L); })));
    b.members.push_back(
        member("heat-wide", SpaceTimeField::scalar(g, [L](auto x, double t) { return periodic_heat(x[0] + 0.5, t + 3.0, L); })));
    const Field bump = Field::scalar(g.spatial(), [](auto x) { return std::exp(-(x[0] - 0.3) * (x[0] - 0.3) / 0.25); });
    b.members.push_back(member("bump-evolved", evolve(g, bump, [](double k2) { return k2; })));
  } else if (theorem_id == "fractional") {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional battery needs s in (0, 1)");
    b.s = s;
    const Grid g = Grid::space_time(1, N, 16.0, 128, 4.0);
    g.validate();
    const auto sym = [s](double k2) { return std::pow(k2, s); };
    b.members.push_back(member("const", SpaceTimeField::scalar(g, [](auto, double) { return 1.0; })));
    const Field bump0 = Field::scalar(g.spatial(), [](auto x) { return std::exp(-x[0] * x[0] / 0.5); });
    const Field bump1 = Field::scalar(g.spatial(), [](auto x) { return std::exp(-(x[0] - 1.0) * (x[0] - 1.0) / 0.3); });
    b.members.push_back(member("frac-bump-0", evolve(g, bump0, sym)));
    b.members.push_back(member("frac-bump-1", evolve(g, bump1, sym)));
    b.members.push_back(member("far-negative", SpaceTimeField::scalar(g, [](auto x, double) {
                                 return 1.0 - 2.0 * std::exp(-(x[0] - 6.0) * (x[0] - 6.0) / 0.5);
                               })));
  } else if (theorem_id == "master") {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("master battery needs s in (0, 1)");
    b.s = s;
    const Grid g = Grid::space_time(1, N, 8.0, 128, 2.5);
    g.validate();
    const double L = g.L;
    b.members.push_back(member("const", SpaceTimeField::scalar(g, [](auto, double) { return 1.0; })));
    b.members.push_back(member(
        "caloric-0", discrete_caloric(g, Field::scalar(g.spatial(), [L](auto x) { return periodic_heat(x[0], 0.5, L); }))));
    b.members.push_back(member("caloric-shift", discrete_caloric(g, Field::scalar(g.spatial(), [L](auto x) {
                                                                  return periodic_heat(x[0] - 0.4, 0.3, L);
                                                                }))));
    const HsOptions causal{TimeMode::causal, 0.0, History::zero};
    const auto g1 = SpaceTimeField::scalar(g, [](auto x, double t) {
      return std::exp(-x[0] * x[0] / 0.1) * std::exp(-(t + 1.05) * (t + 1.05) / 0.005);
    });
    const auto g2 = SpaceTimeField::scalar(g, [](auto x, double t) {
      return std::exp(-(x[0] - 0.3) * (x[0] - 0.3) / 0.5) * std::exp(-(t + 0.9) * (t + 0.9) / 0.02);
    });
    b.members.push_back(member("solve-bump", hs_solve(g1, s, causal), History::zero));
    b.members.push_back(member("solve-wide", hs_solve(g2, s, causal), History::zero));
  } else {
    throw ConfigError("unknown theorem id " + theorem_id + " (local | fractional | master)");
  }
  return b;
}

BatteryResult run_battery(const Battery& b) {
  BatteryResult res;
  res.battery = b;
  for (const auto& m : b.members) {
    HarnackReport rep;
    if (b.theorem_id == "local")
      rep = harnack_report_local(m.v);
    else if (b.theorem_id == "fractional")
      rep = harnack_report_fractional(m.v, {0.0, 0.0}, 0.0, 0.5, 2.0, b.s);
    else
      rep = harnack_report_master(m.v, b.s, m.history);
    res.audits_ok = res.audits_ok && rep.audit_ok && std::isfinite(rep.ratio);
    res.ratio_cap = std::max(res.ratio_cap, rep.ratio);
    res.reports.push_back(rep);
  }
  return res;
}

void write_report_csv(const std::filesystem::path& path, const BatteryResult& res) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << std::setprecision(17)
      << "battery_id,theorem_id,s,r,R,N,l1_avg,inf_plus,tail,ratio,residual_audit,truncation_bound\n";
  for (const auto& r : res.reports)
    out << res.battery.battery_id << ',' << r.theorem_id << ',' << r.s << ',' << r.r << ',' << r.R << ','
        << res.battery.N << ',' << r.l1_avg << ',' << r.inf_plus << ',' << r.tail << ',' << r.ratio << ','
        << r.residual_audit << ',' << r.truncation_bound << '\n';
}

void write_battery_manifest(const std::filesystem::path& path, const Battery& b) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << std::setprecision(17) << "battery_id,theorem_id,s,N,index,member,history\n";
  for (std::size_t i = 0; i < b.members.size(); ++i)
    out << b.battery_id << ',' << b.theorem_id << ',' << b.s << ',' << b.N << ',' << i << ',' << b.members[i].id << ','
        << (b.members[i].history == History::zero ? "zero" : "caloric") << '\n';
}

}  // namespace fhl
