#include "fhl/master_operator.hpp"

#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "fhl/errors.hpp"

namespace fhl {

cplx hs_symbol(double kappa2, double omega, double s) {
  if (kappa2 == 0.0 && omega == 0.0) return 0.0;
  return std::pow(cplx(kappa2, omega), s);
}

std::vector<double> binomial_series(double s, int K) {
  std::vector<double> g(std::max(K, 0));
  if (K > 0) g[0] = 1.0;
  for (int k = 1; k < K; ++k) g[k] = g[k - 1] * (k - 1 - s) / k;
  return g;
}

namespace {

std::vector<int> space_dims(const Grid& g) { return g.n == 1 ? std::vector<int>{g.N} : std::vector<int>{g.N, g.N}; }

// Backward-Euler convolution quadrature of ((1 - z)/dt + |kappa|^2)^s per spatial mode.
SpaceTimeField causal_apply(const SpaceTimeField& F, double s, History history) {
  const Grid& g = F.grid();
  if (history == History::caloric && s < 0.0)
    throw ConfigError("caloric history needs a nonnegative power");
  const std::size_t ns = g.space_points();
  const int nt = g.Nt;
  const double dt = g.dt();
  const auto dims = space_dims(g);
  const auto gk = binomial_series(s, nt);
  std::vector<double> partial(nt);
  double acc = 0.0;
  for (int k = 0; k < nt; ++k) partial[k] = (acc += gk[k]);

  SpaceTimeField out(g, F.m());
  std::vector<cplx> buf(static_cast<std::size_t>(nt) * ns);
  std::vector<cplx> series(nt), res(nt);
  std::vector<double> w(nt);
  for (int c = 0; c < F.m(); ++c) {
    for (int j = 0; j < nt; ++j) {
      for (std::size_t p = 0; p < ns; ++p) buf[j * ns + p] = F.at(j, p, c);
      fft_forward(std::span<cplx>(buf).subspan(j * ns, ns), dims);
    }
    for (std::size_t p = 0; p < ns; ++p) {
      const double k2 = kappa_squared(g, p);
      const double A = std::pow((1.0 + k2 * dt) / dt, s);
      const double r = 1.0 / (1.0 + k2 * dt);
      double rk = 1.0;
      for (int k = 0; k < nt; ++k, rk *= r) w[k] = A * gk[k] * rk;
      for (int j = 0; j < nt; ++j) series[j] = buf[j * ns + p];
      double rj = 1.0;
      for (int j = 0; j < nt; ++j, rj *= r) {
        cplx sum = 0.0;
        for (int k = 0; k <= j; ++k) sum += w[k] * series[j - k];
        if (history == History::caloric) sum -= A * rj * partial[j] * series[0];
        res[j] = sum;
      }
      for (int j = 0; j < nt; ++j) buf[j * ns + p] = res[j];
    }
    std::vector<double> comp(static_cast<std::size_t>(nt) * ns);
    for (int j = 0; j < nt; ++j) {
      auto slice = std::span<cplx>(buf).subspan(j * ns, ns);
      fft_inverse(slice, dims);
      for (std::size_t p = 0; p < ns; ++p) comp[j * ns + p] = slice[p].real();
    }
    out.set_component(c, comp);
  }
  return out;
}

int pad_samples(const Grid& g, const HsOptions& opt) {
  if (!(opt.pad_fraction >= 0.0)) throw ConfigError("pad_fraction must be >= 0");
  return static_cast<int>(std::lround(opt.pad_fraction * g.Nt));
}

void require_time(const Grid& g) {
  g.validate();
  if (!g.has_time()) throw ConfigError("H^s needs a space-time grid");
}

}  // namespace

SpaceTimeField hs_apply(const SpaceTimeField& F, double s, const HsOptions& opt) {
  require_time(F.grid());
  const auto sym = [s](std::array<double, 2> k, double om) { return hs_symbol(k[0] * k[0] + k[1] * k[1], om, s); };
  switch (opt.mode) {
    case TimeMode::periodic: return apply_multiplier(F, sym, 0);
    case TimeMode::padded: return apply_multiplier(F, sym, pad_samples(F.grid(), opt));
    case TimeMode::causal: return causal_apply(F, s, opt.history);
  }
  throw ConfigError("unknown time mode");
}

SpaceTimeField hs_solve(const SpaceTimeField& g, double s, const HsOptions& opt, HsSolveReport* report) {
  require_time(g.grid());
  if (report) {
    const auto c0 = g.component(0);
    double sum = 0.0;
    for (double v : c0) sum += v;
    report->removed_mean = opt.mode == TimeMode::causal ? 0.0 : sum / static_cast<double>(c0.size());
  }
  const auto inv = [s](std::array<double, 2> k, double om) {
    const double k2 = k[0] * k[0] + k[1] * k[1];
    if (k2 == 0.0 && om == 0.0) return cplx(0.0);
    return 1.0 / hs_symbol(k2, om, s);
  };
  switch (opt.mode) {
    case TimeMode::periodic: return apply_multiplier(g, inv, 0);
    case TimeMode::padded: return apply_multiplier(g, inv, pad_samples(g.grid(), opt));
    case TimeMode::causal: return causal_apply(g, -s, History::zero);
  }
  throw ConfigError("unknown time mode");
}

cplx extension_multiplier(double y, double kappa2, double omega, double s, double tau_min, double tau_max, int nodes,
                          double* tail) {
  const cplx lambda(kappa2, omega);
  const bool zero = kappa2 == 0.0 && omega == 0.0;
  const double theta = zero ? 0.0 : -std::arg(lambda) / 2.0;
  const cplx e = std::polar(1.0, theta);
  const cplx phase = std::polar(1.0, -theta * s);
  const double prefactor = std::pow(y, 2.0 * s) / (std::pow(2.0, 2.0 * s) * std::tgamma(s));
  const double lo = std::log(tau_min), hi = std::log(tau_max);
  const double du = (hi - lo) / (nodes - 1);
  const auto integrand = [&](double t, cplx* deriv) {
    const cplx te = t * e;
    const cplx f = std::pow(t, -s) * std::exp(-y * y / (4.0 * te) - te * lambda);
    if (deriv) *deriv = f * (-s + y * y / (4.0 * te) - te * lambda);
    return f;
  };
  cplx sum = 0.0, d_lo = 0.0, d_hi = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double t = std::exp(lo + i * du);
    cplx* deriv = i == 0 ? &d_lo : (i == nodes - 1 ? &d_hi : nullptr);
    sum += (i == 0 || i == nodes - 1 ? 0.5 : 1.0) * integrand(t, deriv);
  }
  // First Euler-Maclaurin endpoint correction in the log variable.
  cplx val = prefactor * phase * (sum * du - du * du / 12.0 * (d_hi - d_lo));

  const double c_lo = y * y * std::cos(theta) / 4.0;
  double bound = prefactor * std::pow(c_lo, -s) * gsl_sf_gamma_inc(s, c_lo / tau_min);
  if (zero) {
    val += gsl_sf_gamma_inc_P(s, y * y / (4.0 * tau_max));
  } else {
    const double c_hi = std::abs(lambda) * std::cos(std::arg(lambda) / 2.0);
    bound += prefactor * std::pow(tau_max, -1.0 - s) * std::exp(-c_hi * tau_max) / c_hi;
  }
  if (tail) *tail = bound;
  return val;
}

double extension_multiplier_exact(double y, double lambda, double s) {
  const double z = y * std::sqrt(lambda);
  if (z == 0.0) return 1.0;
  return std::pow(2.0, 1.0 - s) / std::tgamma(s) * std::pow(z, s) * gsl_sf_bessel_Knu(s, z);
}

void ExtensionStack::validate() const {
  if (y_levels.empty()) throw ConfigError("extension stack needs at least one level");
  if (!(y_levels.front() > 0.0) || y_levels.front() > 0.01)
    throw ConfigError("first extension level must lie in (0, 0.01]");
  for (std::size_t i = 1; i < y_levels.size(); ++i)
    if (!(y_levels[i] > y_levels[i - 1])) throw ConfigError("extension levels must be strictly increasing");
  if (slices.size() != y_levels.size()) throw GridMismatchError("one slice per level expected");
  for (const auto& sl : slices)
    if (!(sl.grid() == base.grid()) || sl.m() != base.m()) throw GridMismatchError("slice grid differs from base");
}

std::vector<double> log_levels(double y_min, double y_max, int count) {
  if (!(y_min > 0.0) || !(y_max > y_min) || count < 2) throw ConfigError("log_levels needs 0 < y_min < y_max, count >= 2");
  std::vector<double> y(count);
  for (int k = 0; k < count; ++k) y[k] = y_min * std::pow(y_max / y_min, static_cast<double>(k) / (count - 1));
  return y;
}

ExtensionStack extension_build(const SpaceTimeField& v, const FracParams& p, const std::vector<double>& y_levels,
                               const ExtensionQuadrature& q) {
  p.validate();
  const Grid& g = v.grid();
  require_time(g);
  if (q.nodes < 2) throw ConfigError("extension quadrature needs at least two nodes");
  ExtensionStack st;
  st.base = v;
  st.p = p;
  st.y_levels = y_levels;
  st.slices.assign(y_levels.size(), SpaceTimeField());
  const double tau_max = q.tau_max_factor * (g.T_len * g.T_len + g.L * g.L);
  for (std::size_t i = 0; i < y_levels.size(); ++i) {
    const double y = y_levels[i];
    const double tau_min = q.tau_min_factor * y * y;
    double worst = 0.0;
    st.slices[i] = apply_multiplier(
        v,
        [&](std::array<double, 2> k, double om) {
          double tail = 0.0;
          const cplx m = extension_multiplier(y, k[0] * k[0] + k[1] * k[1], om, p.s, tau_min, tau_max, q.nodes, &tail);
          worst = std::max(worst, tail);
          return m;
        },
        0);
    if (!(worst <= q.tail_tolerance)) {
      std::ostringstream msg;
      msg << "extension tail bound " << worst << " exceeds " << q.tail_tolerance << " at y = " << y;
      throw AccuracyError(msg.str());
    }
  }
  st.validate();
  return st;
}

double ExtensionResidual::max_relative() const {
  double r = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) r = std::max(r, residual[i] / std::max(scale[i], 1e-300));
  return r;
}

ExtensionResidual extension_residual(const ExtensionStack& st) {
  st.validate();
  const double a = st.p.a;
  const auto& y = st.y_levels;
  ExtensionResidual out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double h1 = y[i] - y[i - 1], h2 = y[i + 1] - y[i];
    if (std::abs(h1 - h2) > 1e-9 * std::max(h1, h2)) continue;
    const auto heat = apply_multiplier(
        st.slices[i], [](std::array<double, 2> k, double om) { return cplx(-(k[0] * k[0] + k[1] * k[1]), -om); }, 0);
    const double ya = std::pow(y[i], a);
    double res = 0.0, scale = 0.0;
    const auto um = st.slices[i - 1].values(), u0 = st.slices[i].values(), up = st.slices[i + 1].values();
    const auto hv = heat.values();
    for (std::size_t k = 0; k < u0.size(); ++k) {
      const double uy = (-h2 / (h1 * (h1 + h2))) * um[k] + ((h2 - h1) / (h1 * h2)) * u0[k] + (h1 / (h2 * (h1 + h2))) * up[k];
      const double uyy = 2.0 * (um[k] / (h1 * (h1 + h2)) - u0[k] / (h1 * h2) + up[k] / (h2 * (h1 + h2)));
      res = std::max(res, std::abs(ya * (uyy + hv[k]) + a * ya / y[i] * uy));
      scale = std::max(scale, std::abs(ya * hv[k]));
    }
    out.y.push_back(y[i]);
    out.residual.push_back(res);
    out.scale.push_back(scale);
  }
  return out;
}

double neumann_constant_reference(double s) { return std::pow(2.0, 1.0 - 2.0 * s) * std::tgamma(1.0 - s) / std::tgamma(s); }

NeumannEstimate neumann_trace_estimate(const ExtensionStack& st, double probe_fraction) {
  st.validate();
  const auto& y = st.y_levels;
  if (y.size() < 3) throw EstimationError("neumann estimate needs at least three levels");
  const double s = st.p.s;
  const std::size_t K = std::min<std::size_t>(y.size(), 6);

  // Least squares of U(y) ~ alpha + beta y^{2s} + gamma y^2 on the smallest K levels;
  // -y^a U_y -> -2 s beta as y -> 0.
  double G[3][3] = {};
  std::vector<std::array<double, 3>> rows(K);
  for (std::size_t i = 0; i < K; ++i) {
    rows[i] = {1.0, std::pow(y[i] / y[0], 2.0 * s), (y[i] / y[0]) * (y[i] / y[0])};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) G[r][c] += rows[i][r] * rows[i][c];
  }
  // Solve the 3x3 normal equations by Cramer's rule on the scaled basis.
  const auto det3 = [](const double M[3][3]) {
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
  };
  const double D = det3(G);
  if (!(std::abs(D) > 0.0)) throw EstimationError("degenerate level set for the neumann fit");

  const auto hs = hs_apply(st.base, s, {TimeMode::periodic, 0.0, History::zero});
  const auto hv = hs.values();
  double hmax = 0.0;
  for (double v : hv) hmax = std::max(hmax, std::abs(v));
  if (!(hmax > 0.0)) throw EstimationError("H^s v vanishes on the grid");

  const double beta_scale = std::pow(y[0], -2.0 * s);
  std::vector<double> flux, target;
  for (std::size_t k = 0; k < hv.size(); ++k) {
    if (std::abs(hv[k]) < probe_fraction * hmax) continue;
    double b[3] = {};
    for (std::size_t i = 0; i < K; ++i)
      for (int r = 0; r < 3; ++r) b[r] += rows[i][r] * st.slices[i].values()[k];
    double M[3][3];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) M[r][c] = c == 1 ? b[r] : G[r][c];
    const double beta = det3(M) / D * beta_scale;
    flux.push_back(-2.0 * s * beta);
    target.push_back(hv[k]);
  }
  if (flux.empty()) throw EstimationError("no probe point qualifies");

  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < flux.size(); ++k) {
    num += flux[k] * target[k];
    den += target[k] * target[k];
  }
  NeumannEstimate est;
  est.C_est = num / den;
  est.probes = flux.size();
  est.level = y[0];
  for (std::size_t k = 0; k < flux.size(); ++k)
    est.spread = std::max(est.spread, std::abs(flux[k] / target[k] - est.C_est) / std::abs(est.C_est));
  return est;
}

NeumannEstimate neumann_trace_estimate(const SpaceTimeField& v, const FracParams& p, const std::vector<double>& y_levels,
                                       double probe_fraction) {
  return neumann_trace_estimate(extension_build(v, p, y_levels), probe_fraction);
}

SpaceTimeField bilinear_C(const SpaceTimeField& u, const HsOptions& opt) {
  const auto hu = hs_apply(u, 0.5, opt);
  SpaceTimeField sq(u.grid(), 1);
  const std::size_t P = u.grid().points();
  for (std::size_t k = 0; k < P; ++k) {
    double acc = 0.0;
    for (int c = 0; c < u.m(); ++c) acc += u.values()[k * u.m() + c] * u.values()[k * u.m() + c];
    sq.values()[k] = acc;
  }
  const auto hsq = hs_apply(sq, 0.5, opt);
  SpaceTimeField out(u.grid(), 1);
  for (std::size_t k = 0; k < P; ++k) {
    double dot = 0.0;
    for (int c = 0; c < u.m(); ++c) dot += u.values()[k * u.m() + c] * hu.values()[k * u.m() + c];
    out.values()[k] = dot - 0.5 * hsq.values()[k];
  }
  return out;
}

namespace {

std::string level_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "level_%04zu.bin", i);
  return buf;
}

}  // namespace

void write_stack(const std::filesystem::path& dir, const ExtensionStack& st) {
  st.validate();
  std::filesystem::create_directories(dir);
  std::ofstream man(dir / "manifest.csv");
  if (!man) throw InputError("cannot write stack manifest in " + dir.string());
  man << std::setprecision(17) << "s,a,c_norm\n" << st.p.s << ',' << st.p.a << ',' << st.p.c_norm << '\n';
  man << "level,y,file\n";
  write_binary(dir / "base.bin", st.base);
  for (std::size_t i = 0; i < st.y_levels.size(); ++i) {
    man << i << ',' << st.y_levels[i] << ',' << level_name(i) << '\n';
    write_binary(dir / level_name(i), st.slices[i]);
  }
}

ExtensionStack read_stack(const std::filesystem::path& dir) {
  std::ifstream man(dir / "manifest.csv");
  if (!man) throw InputError("no stack manifest in " + dir.string());
  ExtensionStack st;
  std::string line;
  std::getline(man, line);
  std::getline(man, line);
  {
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    st.p.s = std::stod(cell);
    std::getline(row, cell, ',');
    st.p.a = std::stod(cell);
    std::getline(row, cell, ',');
    st.p.c_norm = std::stod(cell);
  }
  std::getline(man, line);
  st.base = read_space_time_field(dir / "base.bin");
  while (std::getline(man, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    st.y_levels.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    st.slices.push_back(read_space_time_field(dir / line.substr(c2 + 1)));
  }
  st.validate();
  return st;
}

}  // namespace fhl
