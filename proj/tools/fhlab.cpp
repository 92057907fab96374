#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>

#include "config.hpp"
#include "fhl/errors.hpp"
#include "fhl/fractional_flow.hpp"
#include "fhl/harnack.hpp"
#include "fhl/local_flow.hpp"
#include "fhl/master_operator.hpp"
#include "fhl/oscillation.hpp"
#include "fhl/spectral.hpp"

namespace fs = std::filesystem;
using namespace fhl;
using fhlab::ExperimentConfig;

namespace {

constexpr int kPass = 0;
constexpr int kVerificationFailure = 1;
constexpr int kConfigError = 2;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

Field initial_data(const ExperimentConfig& c) {
  const Grid g = Grid::space(c.n, c.N, c.L);
  g.validate();
  const double k = kTwoPi / c.L, M = c.M;
  if (c.init == "phase")
    return Field::sample(g, 2, [k, M](auto x, std::span<double> o) {
      const double ph = 0.8 * std::sin(k * x[0]) + 0.4 * std::cos(2.0 * k * x[0]);
      o[0] = M * std::cos(ph);
      o[1] = M * std::sin(ph);
    });
  if (c.init == "wave")
    return Field::scalar(g, [k, M](auto x) { return M * (0.625 * std::cos(k * x[0]) + 0.375 * std::sin(2.0 * k * x[0])); });
  return Field::scalar(g, [M](auto x) { return M * std::exp(-(x[0] * x[0] + x[1] * x[1])); });
}

struct Check {
  std::string name;
  double s = 0.0;
  double value = 0.0;
  double tolerance = 0.0;
  bool ok = true;
};

void write_checks(const fs::path& path, const std::vector<Check>& checks) {
  auto out = open_csv(path);
  out << "check,s,value,tolerance,ok\n";
  for (const auto& c : checks) out << c.name << ',' << c.s << ',' << c.value << ',' << c.tolerance << ',' << (c.ok ? 1 : 0) << '\n';
}

bool all_ok(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
}

Check upper(std::string name, double s, double value, double tol) { return {std::move(name), s, value, tol, value <= tol}; }
Check lower(std::string name, double s, double value, double tol) { return {std::move(name), s, value, tol, value >= tol}; }

double sup_diff(SpaceTimeField a, const SpaceTimeField& b) {
  a += -1.0 * b;
  return a.sup_norm();
}

int cmd_run_local(const ExperimentConfig& c, const fs::path& dir) {
  const Field u0 = initial_data(c);
  const double dt = c.dt > 0.0 ? c.dt : local_dt_max(u0.grid());
  LocalRunOptions opt;
  opt.t_start = c.t_start;
  opt.sample_every = c.sample_every;
  const auto run = run_local(u0, c.T, dt, opt);
  const auto& d = run.diagnostics;
  export_trajectory(dir / "trajectory", run.trajectory, {{"sup_norm", d.sup_norm}, {"energy", d.energy}});
  auto out = open_csv(dir / "diagnostics.csv");
  out << "time,sup_norm,energy,sphere_defect\n";
  for (std::size_t i = 0; i < d.times.size(); ++i)
    out << d.times[i] << ',' << d.sup_norm[i] << ',' << d.energy[i] << ',' << (d.sphere_valued ? d.sphere_defect[i] : 0.0) << '\n';
  return d.sphere_valued && d.max_sphere_defect > 1e-5 ? kVerificationFailure : kPass;
}

int cmd_run_fractional(const ExperimentConfig& c, const fs::path& dir) {
  const Field u0 = initial_data(c);
  const auto p = FracParams::make(c.s, c.n);
  const double dt = c.dt > 0.0 ? c.dt : fractional_dt_max(u0.grid(), p);
  FractionalRunOptions opt;
  opt.t_start = c.t_start;
  opt.sample_every = c.sample_every;
  const auto run = run_fractional(u0, c.T, dt, p, frac_harmonic_rhs(u0.sup_norm()), opt);
  export_trajectory(dir / "trajectory", run.trajectory, {});
  write_bstats_csv(dir / "bstats.csv", run.stats);
  return run.stats.total_hits() == 0 ? kPass : kVerificationFailure;
}

int cmd_verify_identities(const ExperimentConfig& c, const fs::path& dir) {
  std::vector<Check> checks;
  const auto passes = fhlab::split_list(c.passes);
  auto wants = [&](const char* p) { return std::find(passes.begin(), passes.end(), p) != passes.end(); };
  const std::array<double, 3> sweep{0.25, 0.5, 0.75};

  if (wants("carre")) {
    const Grid g = Grid::space(1, 128, 12.0);
    const Field u = Field::scalar(g, [](auto x) { return std::exp(-x[0] * x[0]) * (1.0 + 0.5 * std::sin(2.0 * x[0])); });
    for (double s : sweep) {
      const auto p = FracParams::make(s);
      const double scale = u.sup_norm() * frac_laplacian_quadrature(u, p).sup_norm();
      checks.push_back(upper("carre_du_champ_kernel", s, carre_du_champ_residual(u, p) / scale, 1e-12));
    }
  }
  if (wants("quadrature")) {
    const Grid g = Grid::space(1, 256, 20.0);
    const Field u = Field::scalar(g, [](auto x) { return std::exp(-x[0] * x[0]); });
    for (double s : sweep) {
      const auto p = FracParams::make(s);
      const Field spec = frac_laplacian_spectral(u, p);
      checks.push_back(upper("quadrature_vs_spectral", s, (frac_laplacian_quadrature(u, p) - spec).sup_norm() / spec.sup_norm(), 1e-3));
    }
  }
  if (wants("scaling")) {
    const Grid g = Grid::space(1, 256, 30.0);
    const Field u = Field::scalar(g, [](auto x) { return std::exp(-x[0] * x[0]); });
    checks.push_back(upper("scaling_half", 0.5, scaling_check(u, 0.5, FracParams::make(0.5)), 1e-3));
  }
  if (wants("semigroup")) {
    const Grid g = Grid::space_time(1, 64, 20.0, 64, 20.0);
    const auto v = SpaceTimeField::scalar(g, [](auto x, double t) { return std::exp(-x[0] * x[0] / 4 - t * t / 4); });
    const HsOptions per{TimeMode::periodic, 0.0, History::zero}, cau{TimeMode::causal, 0.0, History::zero};
    const auto heat = apply_multiplier(v, [](auto k, double om) { return cplx(k[0] * k[0], om); });
    checks.push_back(upper("s1_reduction", 1.0, sup_diff(hs_apply(v, 1.0, per), heat) / heat.sup_norm(), 1e-12));
    checks.push_back(upper("semigroup_periodic", 0.75, sup_diff(hs_apply(hs_apply(v, 0.3, per), 0.45, per), hs_apply(v, 0.75, per)), 1e-12));
    checks.push_back(upper("semigroup_causal", 0.75, sup_diff(hs_apply(hs_apply(v, 0.3, cau), 0.45, cau), hs_apply(v, 0.75, cau)), 1e-12));
  }
  if (wants("normalization")) {
    const Grid g = Grid::space(1, 128, kTwoPi);
    const Field cos1 = Field::scalar(g, [](auto x) { return std::cos(x[0]); });
    for (double s : sweep)
      checks.push_back(upper("unit_mode_quadrature", s, (frac_laplacian_quadrature(cos1, FracParams::make(s)) - cos1).sup_norm(), 1e-3));
    const Grid ge = Grid::space_time(1, 32, kTwoPi, 16, kTwoPi);
    const auto one = SpaceTimeField::scalar(ge, [](auto, double) { return 1.0; });
    for (double s : sweep) {
      double err = 0.0;
      for (const auto& sl : extension_build(one, FracParams::make(s), {1e-3, 0.1, 0.5}).slices) err = std::max(err, sup_diff(sl, one));
      checks.push_back(upper("extension_constant", s, err, 1e-10));
    }
  }
  write_checks(dir / "identities.csv", checks);
  return all_ok(checks) ? kPass : kVerificationFailure;
}

int cmd_verify_extension(const ExperimentConfig& c, const fs::path& dir) {
  const Grid g = Grid::space_time(1, 64, kTwoPi, 32, kTwoPi);
  const auto p = FracParams::make(c.s);
  const auto one = SpaceTimeField::scalar(g, [](auto, double) { return 1.0; });
  const auto wa = SpaceTimeField::scalar(g, [](auto x, double t) { return std::cos(x[0] + t); });
  const auto wb = SpaceTimeField::scalar(g, [](auto x, double t) { return std::cos(2.0 * x[0] - 3.0 * t) + 0.5 * std::sin(x[0]); });
  std::vector<Check> checks;

  double cerr = 0.0;
  for (const auto& sl : extension_build(one, p, {1e-3, 0.1, 0.5}).slices) cerr = std::max(cerr, sup_diff(sl, one));
  checks.push_back(upper("constant_trace", c.s, cerr, 1e-10));

  const auto ys = log_levels(1e-4, 1e-2, 3);
  const auto st = extension_build(wb, p, ys);
  const double order = std::log(sup_diff(st.slices[2], wb) / sup_diff(st.slices[0], wb)) / std::log(ys[2] / ys[0]);
  checks.push_back(lower("trace_order", c.s, order, std::min(1.0, 2.0 * c.s) - 0.1));

  double res[2];
  int i = 0;
  for (double dy : {0.025, 0.0125}) {
    std::vector<double> yl{0.01};
    for (int k = 0; k <= static_cast<int>(0.4 / dy + 0.5); ++k) yl.push_back(0.2 + k * dy);
    res[i++] = extension_residual(extension_build(wb, p, yl)).max_relative();
  }
  checks.push_back(upper("residual_refinement_ratio", c.s, res[1] / res[0], 0.5));

  const auto na = neumann_trace_estimate(wa, p), nb = neumann_trace_estimate(wb, p);
  checks.push_back(lower("neumann_C_est", c.s, std::min(na.C_est, nb.C_est), 0.0));
  checks.push_back(upper("neumann_spread", c.s, std::max({na.spread, nb.spread, std::abs(na.C_est - nb.C_est) / na.C_est}), 0.02));
  checks.back().ok = checks.back().ok && na.C_est > 0.0;

  write_stack(dir / "stack", st);
  write_checks(dir / "extension.csv", checks);
  return all_ok(checks) ? kPass : kVerificationFailure;
}

int cmd_harnack(const ExperimentConfig& c, const fs::path& dir) {
  const std::string theorem = fhlab::canonical_theorem(c.theorem);
  const auto battery = build_battery(theorem, theorem == "local" ? 1.0 : c.s, c.N);
  const auto res = run_battery(battery);
  write_battery_manifest(dir / "battery_manifest.csv", battery);
  write_report_csv(dir / "harnack_report.csv", res);
  return res.audits_ok && std::isfinite(res.ratio_cap) ? kPass : kVerificationFailure;
}

int cmd_cascade(const ExperimentConfig& c, const fs::path& dir) {
  const Field u0 = initial_data(c);
  Trajectory traj;
  double s = 1.0;
  if (c.flow == "local") {
    LocalRunOptions opt;
    opt.t_start = c.anchor_t;
    traj = run_local(u0, c.T, c.dt > 0.0 ? c.dt : local_dt_max(u0.grid()), opt).trajectory;
  } else {
    s = c.s;
    const auto p = FracParams::make(s, c.n);
    FractionalRunOptions opt;
    opt.t_start = c.anchor_t - c.T;
    traj = run_fractional(u0, c.T, c.dt > 0.0 ? c.dt : fractional_dt_max(u0.grid(), p), p, frac_harmonic_rhs(u0.sup_norm()), opt)
               .trajectory;
  }
  CascadeOptions opt;
  opt.anchor_x = {c.anchor_x, 0.0};
  opt.anchor_t = c.anchor_t;
  opt.max_levels = c.levels;
  const auto mode = c.flow == "local" ? CascadeMode::local : CascadeMode::fractional;
  const auto rep = oscillation_cascade(traj, c.r, s, mode, opt);
  write_cascade_csv(dir / "cascade.csv", rep);

  const double battery_C = run_battery(build_battery(c.flow, s, c.N)).ratio_cap;
  const auto hf = holder_fit(rep, battery_C, rep.M);
  auto out = open_csv(dir / "holder.csv");
  out << "alpha_fit,al_bound,al_ok,battery_C,r_admissible,C0,tail_constant,update_law_ok\n";
  if (hf.alpha)
    out << *hf.alpha;
  else
    out << "NA";
  out << ',' << hf.al_bound << ',' << (hf.al_ok ? 1 : 0) << ',' << battery_C << ',' << (hf.r_admissible ? 1 : 0) << ',' << rep.C0
      << ',' << rep.tail_constant << ',' << (rep.update_law_ok ? 1 : 0) << '\n';

  bool monotone = true;
  for (std::size_t k = 1; k < rep.levels.size(); ++k) monotone = monotone && rep.levels[k].M_k <= rep.levels[k - 1].M_k;
  return monotone && rep.update_law_ok ? kPass : kVerificationFailure;
}

int cmd_tail(const ExperimentConfig& c, const fs::path& dir) {
  SpaceTimeField v;
  std::string source;
  if (!c.input.empty()) {
    v = read_space_time_field(c.input);
    source = fs::path(c.input).filename().string();
  } else {
    const auto b = build_battery("fractional", c.s, c.N);
    const auto it = std::find_if(b.members.begin(), b.members.end(), [&](const BatteryMember& m) { return m.id == c.member; });
    if (it == b.members.end()) throw ConfigError("unknown battery member '" + c.member + "'");
    v = it->v;
    source = b.battery_id + ":" + it->id;
  }
  // Tail of the negative part, as it enters the weak Harnack inequality.
  for (auto& x : v.values()) x = std::max(-x, 0.0);
  const auto tr = tail_infty(v, {c.x0, 0.0}, c.R, c.t1, c.t2, c.s);
  auto out = open_csv(dir / "tail.csv");
  out << "source,x0,R,t1,t2,s,value,truncation_bound\n";
  out << source << ',' << c.x0 << ',' << c.R << ',' << c.t1 << ',' << c.t2 << ',' << c.s << ',' << tr.value << ','
      << tr.truncation_bound << '\n';
  return kPass;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const AccuracyError*>(&e) ||
      dynamic_cast<const EstimationError*>(&e))
    return kVerificationFailure;
  return kConfigError;
}

// Outputs go to a staging directory that replaces the target entries only on completion.
int execute(const std::string& command, const ExperimentConfig& c,
            const std::function<int(const ExperimentConfig&, const fs::path&)>& body) {
  const fs::path out = c.out;
  const fs::path staging = out / ".staging";
  std::error_code ec;
  const bool fresh = !fs::exists(out);
  fs::remove_all(staging, ec);
  fs::create_directories(staging);
  int code = kPass;
  try {
    code = body(c, staging);
    std::ofstream(staging / "config.txt") << fhlab::to_text(c);
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << '\n';
    fs::remove_all(staging, ec);
    if (fresh && fs::is_empty(out, ec)) fs::remove(out, ec);
    return exit_code_for(e);
  }
  for (const auto& entry : fs::directory_iterator(staging)) {
    const fs::path target = out / entry.path().filename();
    fs::remove_all(target, ec);
    fs::rename(entry.path(), target);
  }
  fs::remove_all(staging, ec);
  std::cout << command << ": " << (code == kPass ? "pass" : "verification failure") << " (outputs in " << out.string() << ")\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fhlab: fractional Harnack and Hoelder experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::function<int(const ExperimentConfig&, const fs::path&)>>> commands{
      {"run-local", cmd_run_local},
      {"run-fractional", cmd_run_fractional},
      {"verify-identities", cmd_verify_identities},
      {"verify-extension", cmd_verify_extension},
      {"harnack", cmd_harnack},
      {"cascade", cmd_cascade},
      {"tail", cmd_tail},
  };
  const std::map<std::string, std::string> blurbs{
      {"run-local", "integrate the local harmonic-map type flow"},
      {"run-fractional", "integrate the fractional flow with u B(u,u)"},
      {"verify-identities", "operator identity suites"},
      {"verify-extension", "extension problem suite at the configured s"},
      {"harnack", "run the versioned Harnack battery"},
      {"cascade", "oscillation cascade on a computed trajectory"},
      {"tail", "nonlocal tail of a field or battery member"},
  };

  std::string config_path;
  std::map<std::string, std::string> overrides;
  const auto keys = fhlab::to_pairs(ExperimentConfig{});
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name, blurbs.at(name));
    sub->add_option("--config", config_path, "key = value config file");
    for (const auto& [key, def] : keys) {
      if (key == "schema") continue;
      sub->add_option_function<std::string>("--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                            "config key (default " + def + ")");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  for (const auto& [name, fn] : commands) {
    if (!app.got_subcommand(name)) continue;
    std::vector<std::string> errors;
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : fhlab::load(config_path, errors);
    for (const auto& [k, v] : overrides) fhlab::set_key(c, k, v, errors);
    for (const auto& e : fhlab::validate(c, name)) errors.push_back(e);
    if (!errors.empty()) {
      for (const auto& e : errors) std::cerr << "config error: " << e << '\n';
      return kConfigError;
    }
    return execute(name, c, fn);
  }
  return kConfigError;
}
