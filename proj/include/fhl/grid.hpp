#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace fhl {

/// Periodic grid on the torus [-L/2, L/2)^n, optionally with a time axis
/// sampled at t_j = -T_len/2 + j*T_len/Nt.
struct Grid {
  int n = 1;
  int N = 64;
  double L = 1.0;
  int Nt = 0;
  double T_len = 0.0;

  static Grid space(int n, int N, double L);
  static Grid space_time(int n, int N, double L, int Nt, double T_len);

  /// Throws ConfigError on N < 8, odd N, L <= 0, n outside {1, 2} or a
  /// malformed time axis.
  void validate() const;

  bool has_time() const { return Nt > 0; }
  double h() const { return L / N; }
  double dt() const { return Nt > 0 ? T_len / Nt : 0.0; }
  std::size_t space_points() const;
  std::size_t points() const { return space_points() * static_cast<std::size_t>(has_time() ? Nt : 1); }

  /// Coordinate of index i along one spatial axis.
  double coord(int i) const { return -0.5 * L + i * h(); }
  double time(int j) const { return -0.5 * T_len + j * dt(); }
  /// Angular wavenumber 2*pi*k/L of FFT index i (k in [-N/2, N/2)).
  double wavenumber(int i) const;
  double angular_frequency(int j) const;

  /// Spatial coordinates of flat spatial index p (second component unused in 1-D).
  std::array<double, 2> point(std::size_t p) const;
  std::array<int, 2> index(std::size_t p) const;

  Grid spatial() const { return Grid{n, N, L, 0, 0.0}; }
  bool same_space(const Grid& o) const { return n == o.n && N == o.N && L == o.L; }
  bool operator==(const Grid& o) const = default;
};

/// Ball B_r(x0) x (t_lo, t_hi).
struct Cylinder {
  std::array<double, 2> x0{0.0, 0.0};
  double r = 1.0;
  double t_lo = 0.0;
  double t_hi = 1.0;

  void validate() const;
  double volume(int n) const;
};

/// Signed periodic displacement from a to b on a circle of length L, in [-L/2, L/2).
double periodic_delta(double a, double b, double L);

}  // namespace fhl
