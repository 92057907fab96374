#include "fhl/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>

#include "fhl/errors.hpp"

namespace fhl {

static_assert(std::endian::native == std::endian::little, "binary field format assumes a little-endian host");

namespace {

void check_same(const Grid& a, int ma, const Grid& b, int mb) {
  if (!(a == b) || ma != mb) throw GridMismatchError("fields live on different grids or have different m");
}

bool finite_all(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Field::Field(Grid grid, int m) : grid_(grid), m_(m), values_(grid.space_points() * m, 0.0) {
  grid_.validate();
  if (m < 1) throw ConfigError("field needs m >= 1");
}

Field::Field(Grid grid, int m, std::vector<double> values) : grid_(grid), m_(m), values_(std::move(values)) {
  grid_.validate();
  if (m < 1) throw ConfigError("field needs m >= 1");
  if (values_.size() != grid_.space_points() * m) throw InputError("field value count does not match grid");
}

Field Field::sample(const Grid& grid, int m,
                    const std::function<void(std::array<double, 2>, std::span<double>)>& f) {
  Field out(grid.spatial(), m);
  for (std::size_t p = 0; p < out.points(); ++p) f(grid.point(p), std::span<double>(out.values_).subspan(p * m, m));
  return out;
}

Field Field::scalar(const Grid& grid, const std::function<double(std::array<double, 2>)>& f) {
  Field out(grid.spatial(), 1);
  for (std::size_t p = 0; p < out.points(); ++p) out.values_[p] = f(grid.point(p));
  return out;
}

std::vector<double> Field::component(int c) const {
  std::vector<double> out(points());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = values_[p * m_ + c];
  return out;
}

void Field::set_component(int c, std::span<const double> data) {
  for (std::size_t p = 0; p < points(); ++p) values_[p * m_ + c] = data[p];
}

std::vector<double> Field::pointwise_norm() const {
  std::vector<double> out(points());
  for (std::size_t p = 0; p < out.size(); ++p) {
    double s = 0.0;
    for (int c = 0; c < m_; ++c) s += values_[p * m_ + c] * values_[p * m_ + c];
    out[p] = std::sqrt(s);
  }
  return out;
}

double Field::sup_norm() const {
  const auto nrm = pointwise_norm();
  return nrm.empty() ? 0.0 : *std::max_element(nrm.begin(), nrm.end());
}

bool Field::all_finite() const { return finite_all(values_); }

Field& Field::operator+=(const Field& o) {
  check_same(grid_, m_, o.grid_, o.m_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  check_same(grid_, m_, o.grid_, o.m_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double a, Field f) { return f *= a; }

SpaceTimeField::SpaceTimeField(Grid grid, int m) : grid_(grid), m_(m), values_(grid.points() * m, 0.0) {
  grid_.validate();
  if (!grid_.has_time()) throw ConfigError("space-time field needs a grid with a time axis");
  if (m < 1) throw ConfigError("field needs m >= 1");
}

SpaceTimeField::SpaceTimeField(Grid grid, int m, std::vector<double> values)
    : grid_(grid), m_(m), values_(std::move(values)) {
  grid_.validate();
  if (!grid_.has_time()) throw ConfigError("space-time field needs a grid with a time axis");
  if (m < 1) throw ConfigError("field needs m >= 1");
  if (values_.size() != grid_.points() * m) throw InputError("field value count does not match grid");
}

SpaceTimeField SpaceTimeField::scalar(const Grid& grid,
                                      const std::function<double(std::array<double, 2>, double)>& f) {
  SpaceTimeField out(grid, 1);
  const std::size_t ns = grid.space_points();
  for (int j = 0; j < grid.Nt; ++j) {
    const double t = grid.time(j);
    for (std::size_t p = 0; p < ns; ++p) out.values_[j * ns + p] = f(grid.point(p), t);
  }
  return out;
}

Field SpaceTimeField::slice(int j) const {
  const std::size_t len = grid_.space_points() * m_;
  std::vector<double> v(values_.begin() + j * len, values_.begin() + (j + 1) * len);
  return Field(grid_.spatial(), m_, std::move(v));
}

void SpaceTimeField::set_slice(int j, const Field& f) {
  if (!grid_.same_space(f.grid()) || f.m() != m_) throw GridMismatchError("slice does not match space-time grid");
  std::copy(f.values().begin(), f.values().end(), values_.begin() + j * grid_.space_points() * m_);
}

std::vector<double> SpaceTimeField::component(int c) const {
  std::vector<double> out(grid_.points());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i * m_ + c];
  return out;
}

void SpaceTimeField::set_component(int c, std::span<const double> data) {
  for (std::size_t i = 0; i < grid_.points(); ++i) values_[i * m_ + c] = data[i];
}

double SpaceTimeField::sup_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < grid_.points(); ++i) {
    double q = 0.0;
    for (int c = 0; c < m_; ++c) q += values_[i * m_ + c] * values_[i * m_ + c];
    s = std::max(s, q);
  }
  return std::sqrt(s);
}

bool SpaceTimeField::all_finite() const { return finite_all(values_); }

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& o) {
  check_same(grid_, m_, o.grid_, o.m_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

SpaceTimeField& SpaceTimeField::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) { return a += b; }
SpaceTimeField operator*(double a, SpaceTimeField f) { return f *= a; }

bool in_outer_shell(const Grid& g, std::size_t p) {
  const auto x = g.point(p);
  const double edge = 0.4 * g.L;
  if (std::abs(x[0]) >= edge) return true;
  return g.n == 2 && std::abs(x[1]) >= edge;
}

DecayGate decay_gate(const Field& f, double eps) {
  DecayGate gate;
  const auto nrm = f.pointwise_norm();
  for (std::size_t p = 0; p < nrm.size(); ++p)
    if (in_outer_shell(f.grid(), p)) gate.shell_sup = std::max(gate.shell_sup, nrm[p]);
  gate.passed = gate.shell_sup < eps;
  return gate;
}

DecayGate decay_gate(const SpaceTimeField& f, double eps) {
  DecayGate gate;
  for (int j = 0; j < f.grid().Nt; ++j) {
    const auto g = decay_gate(f.slice(j), eps);
    gate.shell_sup = std::max(gate.shell_sup, g.shell_sup);
  }
  gate.passed = gate.shell_sup < eps;
  return gate;
}

namespace {

struct Header {
  std::int64_t n, N;
  double L;
  std::int64_t Nt;
  double T_len;
  std::int64_t m;
};

void write_impl(const std::filesystem::path& path, const Grid& g, int m, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  const Header h{g.n, g.N, g.L, g.Nt, g.T_len, m};
  out.write(reinterpret_cast<const char*>(&h.n), 8);
  out.write(reinterpret_cast<const char*>(&h.N), 8);
  out.write(reinterpret_cast<const char*>(&h.L), 8);
  out.write(reinterpret_cast<const char*>(&h.Nt), 8);
  out.write(reinterpret_cast<const char*>(&h.T_len), 8);
  out.write(reinterpret_cast<const char*>(&h.m), 8);
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 8));
}

std::pair<Header, std::vector<double>> read_impl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  Header h{};
  in.read(reinterpret_cast<char*>(&h.n), 8);
  in.read(reinterpret_cast<char*>(&h.N), 8);
  in.read(reinterpret_cast<char*>(&h.L), 8);
  in.read(reinterpret_cast<char*>(&h.Nt), 8);
  in.read(reinterpret_cast<char*>(&h.T_len), 8);
  in.read(reinterpret_cast<char*>(&h.m), 8);
  if (!in) throw InputError("truncated field header in " + path.string());
  Grid g{static_cast<int>(h.n), static_cast<int>(h.N), h.L, static_cast<int>(h.Nt), h.T_len};
  g.validate();
  if (h.m < 1) throw InputError("bad component count in " + path.string());
  std::vector<double> v(g.points() * static_cast<std::size_t>(h.m));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
  if (!in) throw InputError("truncated field data in " + path.string());
  return {h, std::move(v)};
}

}  // namespace

void write_binary(const std::filesystem::path& path, const Field& f) { write_impl(path, f.grid(), f.m(), f.values()); }
void write_binary(const std::filesystem::path& path, const SpaceTimeField& f) {
  write_impl(path, f.grid(), f.m(), f.values());
}

Field read_field(const std::filesystem::path& path) {
  auto [h, v] = read_impl(path);
  if (h.Nt != 0) throw InputError(path.string() + " holds a space-time field");
  return Field(Grid{static_cast<int>(h.n), static_cast<int>(h.N), h.L, 0, 0.0}, static_cast<int>(h.m), std::move(v));
}

SpaceTimeField read_space_time_field(const std::filesystem::path& path) {
  auto [h, v] = read_impl(path);
  if (h.Nt == 0) throw InputError(path.string() + " holds a spatial field");
  return SpaceTimeField(Grid{static_cast<int>(h.n), static_cast<int>(h.N), h.L, static_cast<int>(h.Nt), h.T_len},
                        static_cast<int>(h.m), std::move(v));
}

namespace {

void csv_row(std::ostream& out, const Grid& g, std::size_t p, std::span<const double> comps) {
  const auto x = g.point(p);
  out << x[0];
  if (g.n == 2) out << ',' << x[1];
  for (double c : comps) out << ',' << c;
  out << '\n';
}

void csv_header(std::ostream& out, const Grid& g, int m, bool time) {
  if (time) out << "t,";
  out << "x";
  if (g.n == 2) out << ",y";
  for (int c = 0; c < m; ++c) out << ",u" << c;
  out << '\n';
}

}  // namespace

void write_csv(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  csv_header(out, f.grid(), f.m(), false);
  for (std::size_t p = 0; p < f.points(); ++p) csv_row(out, f.grid(), p, f.values().subspan(p * f.m(), f.m()));
}

void write_csv(const std::filesystem::path& path, const SpaceTimeField& f) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  csv_header(out, f.grid(), f.m(), true);
  const std::size_t ns = f.grid().space_points();
  for (int j = 0; j < f.grid().Nt; ++j)
    for (std::size_t p = 0; p < ns; ++p) {
      out << f.grid().time(j) << ',';
      csv_row(out, f.grid(), p, f.values().subspan((j * ns + p) * f.m(), f.m()));
    }
}

}  // namespace fhl
