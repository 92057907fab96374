#include "fhl/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fhl/errors.hpp"

namespace fhl {

Grid Grid::space(int n, int N, double L) {
  Grid g{n, N, L, 0, 0.0};
  g.validate();
  return g;
}

Grid Grid::space_time(int n, int N, double L, int Nt, double T_len) {
  Grid g{n, N, L, Nt, T_len};
  g.validate();
  if (Nt <= 0) throw ConfigError("space-time grid needs Nt > 0");
  return g;
}

void Grid::validate() const {
  if (n != 1 && n != 2) throw ConfigError("grid dimension must be 1 or 2, got " + std::to_string(n));
  if (N < 8 || N % 2 != 0) throw ConfigError("grid N must be even and >= 8, got " + std::to_string(N));
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("grid L must be positive");
  if (Nt < 0) throw ConfigError("grid Nt must be >= 0");
  if (Nt > 0) {
    if (Nt < 8 || Nt % 2 != 0) throw ConfigError("grid Nt must be even and >= 8, got " + std::to_string(Nt));
    if (!(T_len > 0.0) || !std::isfinite(T_len)) throw ConfigError("grid T_len must be positive");
  }
}

std::size_t Grid::space_points() const {
  return n == 1 ? static_cast<std::size_t>(N) : static_cast<std::size_t>(N) * static_cast<std::size_t>(N);
}

double Grid::wavenumber(int i) const {
  const int k = i < N / 2 ? i : i - N;
  return 2.0 * std::numbers::pi * k / L;
}

double Grid::angular_frequency(int j) const {
  const int k = j < Nt / 2 ? j : j - Nt;
  return 2.0 * std::numbers::pi * k / T_len;
}

std::array<int, 2> Grid::index(std::size_t p) const {
  if (n == 1) return {static_cast<int>(p), 0};
  return {static_cast<int>(p / static_cast<std::size_t>(N)), static_cast<int>(p % static_cast<std::size_t>(N))};
}

std::array<double, 2> Grid::point(std::size_t p) const {
  const auto idx = index(p);
  return {coord(idx[0]), n == 2 ? coord(idx[1]) : 0.0};
}

void Cylinder::validate() const {
  if (!(r > 0.0)) throw ConfigError("cylinder radius must be positive");
  if (!(t_lo < t_hi)) throw ConfigError("cylinder needs t_lo < t_hi");
}

double Cylinder::volume(int n) const {
  const double ball = n == 1 ? 2.0 * r : std::numbers::pi * r * r;
  return ball * (t_hi - t_lo);
}

double periodic_delta(double a, double b, double L) {
  double d = std::fmod(b - a + 0.5 * L, L);
  if (d < 0) d += L;
  return d - 0.5 * L;
}

}  // namespace fhl
