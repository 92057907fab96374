#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "fhl/grid.hpp"

namespace fhl {

/// Sampled map u: grid -> R^m. Values are point-major: values[p*m + c].
class Field {
 public:
  Field() = default;
  Field(Grid grid, int m);
  Field(Grid grid, int m, std::vector<double> values);

  /// Samples f(x) componentwise; f writes m values into its output span.
  static Field sample(const Grid& grid, int m,
                      const std::function<void(std::array<double, 2>, std::span<double>)>& f);
  static Field scalar(const Grid& grid, const std::function<double(std::array<double, 2>)>& f);

  const Grid& grid() const { return grid_; }
  int m() const { return m_; }
  std::size_t points() const { return grid_.space_points(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& at(std::size_t p, int c) { return values_[p * m_ + c]; }
  double at(std::size_t p, int c) const { return values_[p * m_ + c]; }

  std::vector<double> component(int c) const;
  void set_component(int c, std::span<const double> data);

  /// Pointwise Euclidean norm |u(x)|.
  std::vector<double> pointwise_norm() const;
  double sup_norm() const;
  bool all_finite() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double a);

 private:
  Grid grid_;
  int m_ = 1;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);

/// Sampled map over the (t, x) lattice; values[(j*Ns + p)*m + c], time slowest.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(Grid grid, int m);
  SpaceTimeField(Grid grid, int m, std::vector<double> values);

  static SpaceTimeField scalar(const Grid& grid, const std::function<double(std::array<double, 2>, double)>& f);

  const Grid& grid() const { return grid_; }
  int m() const { return m_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& at(int j, std::size_t p, int c = 0) { return values_[(j * grid_.space_points() + p) * m_ + c]; }
  double at(int j, std::size_t p, int c = 0) const { return values_[(j * grid_.space_points() + p) * m_ + c]; }

  Field slice(int j) const;
  void set_slice(int j, const Field& f);
  std::vector<double> component(int c) const;
  void set_component(int c, std::span<const double> data);

  double sup_norm() const;
  bool all_finite() const;

  SpaceTimeField& operator+=(const SpaceTimeField& o);
  SpaceTimeField& operator*=(double a);

 private:
  Grid grid_;
  int m_ = 1;
  std::vector<double> values_;
};

SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b);
SpaceTimeField operator*(double a, SpaceTimeField f);

/// Outcome of the whole-space truncation check: sup |field| on the outer 10% shell.
struct DecayGate {
  double shell_sup = 0.0;
  bool passed = true;
};

inline constexpr double kDecayEpsilon = 1e-8;

DecayGate decay_gate(const Field& f, double eps = kDecayEpsilon);
/// Checks the spatial shell at every time sample.
DecayGate decay_gate(const SpaceTimeField& f, double eps = kDecayEpsilon);
/// True when the spatial point p lies in the outer 10% shell of the box.
bool in_outer_shell(const Grid& g, std::size_t p);

// Binary layout: little-endian int64 n, N; double L; int64 Nt; double T_len; int64 m;
// then row-major doubles (one row per grid point, m columns).
void write_binary(const std::filesystem::path& path, const Field& f);
void write_binary(const std::filesystem::path& path, const SpaceTimeField& f);
Field read_field(const std::filesystem::path& path);
SpaceTimeField read_space_time_field(const std::filesystem::path& path);

/// One row per grid point: coordinates (and t for space-time fields), then components.
void write_csv(const std::filesystem::path& path, const Field& f);
void write_csv(const std::filesystem::path& path, const SpaceTimeField& f);

}  // namespace fhl
