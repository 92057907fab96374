#include "fhl/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

#include "fhl/errors.hpp"

namespace fhl {

namespace {

struct PlanKey {
  std::vector<int> dims;
  int sign;
  bool operator<(const PlanKey& o) const { return std::tie(dims, sign) < std::tie(o.dims, o.sign); }
};

std::mutex plan_mutex;
std::map<PlanKey, fftw_plan>& plan_cache() {
  static std::map<PlanKey, fftw_plan> cache;
  return cache;
}

fftw_plan get_plan(std::span<const int> dims, int sign) {
  std::lock_guard lock(plan_mutex);
  PlanKey key{std::vector<int>(dims.begin(), dims.end()), sign};
  auto& cache = plan_cache();
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  std::vector<cplx> scratch(total);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), key.dims.data(), buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(std::move(key), plan);
  return plan;
}

std::vector<int> space_dims(const Grid& g) {
  return g.n == 1 ? std::vector<int>{g.N} : std::vector<int>{g.N, g.N};
}

}  // namespace

void fft_forward(std::span<cplx> data, std::span<const int> dims) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(get_plan(dims, FFTW_FORWARD), buf, buf);
}

void fft_inverse(std::span<cplx> data, std::span<const int> dims) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(get_plan(dims, FFTW_BACKWARD), buf, buf);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& z : data) z *= scale;
}

std::array<double, 2> kappa_vector(const Grid& g, std::size_t p) {
  const auto idx = g.index(p);
  return {g.wavenumber(idx[0]), g.n == 2 ? g.wavenumber(idx[1]) : 0.0};
}

double kappa_squared(const Grid& g, std::size_t p) {
  const auto k = kappa_vector(g, p);
  return k[0] * k[0] + k[1] * k[1];
}

std::vector<cplx> spatial_symbol_table(const Grid& g, const SpatialSymbol& symbol) {
  std::vector<cplx> table(g.space_points());
  for (std::size_t p = 0; p < table.size(); ++p) {
    table[p] = symbol(kappa_vector(g, p));
    if (!std::isfinite(table[p].real()) || !std::isfinite(table[p].imag()))
      throw InputError("multiplier symbol is not finite on a grid mode");
  }
  return table;
}

std::vector<double> apply_table(const Grid& g, std::span<const double> data, std::span<const cplx> table) {
  const auto dims = space_dims(g);
  std::vector<cplx> buf(data.begin(), data.end());
  fft_forward(buf, dims);
  for (std::size_t p = 0; p < buf.size(); ++p) buf[p] *= table[p];
  fft_inverse(buf, dims);
  std::vector<double> out(buf.size());
  for (std::size_t p = 0; p < buf.size(); ++p) out[p] = buf[p].real();
  return out;
}

Field apply_multiplier(const Field& f, const SpatialSymbol& symbol) {
  const auto table = spatial_symbol_table(f.grid(), symbol);
  Field out(f.grid(), f.m());
  for (int c = 0; c < f.m(); ++c) out.set_component(c, apply_table(f.grid(), f.component(c), table));
  return out;
}

namespace {

// Multiplier on an (Nt_total x space) complex array, time slowest.
void space_time_apply(const Grid& g, int nt_total, std::span<cplx> buf, const SpaceTimeSymbol& symbol) {
  std::vector<int> dims{nt_total};
  for (int d : space_dims(g)) dims.push_back(d);
  fft_forward(buf, dims);
  const std::size_t ns = g.space_points();
  Grid padded = g;
  padded.T_len = g.T_len * nt_total / g.Nt;
  padded.Nt = nt_total;
  for (int j = 0; j < nt_total; ++j) {
    const double omega = padded.angular_frequency(j);
    for (std::size_t p = 0; p < ns; ++p) {
      const cplx sym = symbol(kappa_vector(g, p), omega);
      if (!std::isfinite(sym.real()) || !std::isfinite(sym.imag()))
        throw InputError("multiplier symbol is not finite on a grid mode");
      buf[j * ns + p] *= sym;
    }
  }
  fft_inverse(buf, dims);
}

}  // namespace

SpaceTimeField apply_multiplier(const SpaceTimeField& f, const SpaceTimeSymbol& symbol, int time_pad) {
  const Grid& g = f.grid();
  if (time_pad < 0) throw ConfigError("time padding must be >= 0");
  const std::size_t ns = g.space_points();
  const int nt_total = g.Nt + time_pad;
  SpaceTimeField out(g, f.m());
  for (int c = 0; c < f.m(); ++c) {
    const auto comp = f.component(c);
    std::vector<cplx> buf(static_cast<std::size_t>(nt_total) * ns, cplx{});
    for (std::size_t i = 0; i < comp.size(); ++i) buf[i] = comp[i];
    space_time_apply(g, nt_total, buf, symbol);
    std::vector<double> res(comp.size());
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = buf[i].real();
    out.set_component(c, res);
  }
  return out;
}

void apply_multiplier_complex(const Grid& g, std::span<cplx> data, const SpaceTimeSymbol& symbol) {
  if (data.size() != g.points()) throw GridMismatchError("complex data does not match grid");
  space_time_apply(g, g.Nt, data, symbol);
}

std::vector<double> spectral_derivative(const Grid& g, std::span<const double> data, int axis) {
  const auto table = spatial_symbol_table(g, [axis](std::array<double, 2> k) { return cplx(0.0, k[axis]); });
  return apply_table(g, data, table);
}

std::vector<double> spectral_laplacian(const Grid& g, std::span<const double> data) {
  const auto table = spatial_symbol_table(g, [](std::array<double, 2> k) { return cplx(-(k[0] * k[0] + k[1] * k[1])); });
  return apply_table(g, data, table);
}

std::vector<double> dealias_mask(const Grid& g) {
  std::vector<double> mask(g.space_points(), 1.0);
  const int cut = g.N / 3;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    const auto idx = g.index(p);
    for (int a = 0; a < g.n; ++a) {
      const int k = idx[a] < g.N / 2 ? idx[a] : idx[a] - g.N;
      if (std::abs(k) > cut) mask[p] = 0.0;
    }
  }
  return mask;
}

}  // namespace fhl
