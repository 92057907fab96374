#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fhl/trajectory.hpp"

namespace fhl {

struct Interval {
  double a = 0.0;
  double b = 0.0;
};

struct IntervalCascade {
  std::vector<Interval> intervals;  // I_0 .. I_K
  double t_star = 1.0 / 3.0;
};

/// a_0 = 0, b_0 = 1/2, a_k = (a_{k-1} + b_{k-1})/2, b_k = a_k + (b_{k-1} - a_{k-1})/4.
IntervalCascade interval_cascade(int K);

enum class CascadeMode { local, fractional };

struct CascadeLevel {
  int k = 0;
  double radius = 0.0;
  double t_lo = 0.0, t_hi = 0.0;  // absolute times of the level's cylinder
  double M_k = 0.0;
  std::vector<double> rho;
  std::size_t samples = 0;
  bool rho_bound_ok = true;  // |rho_k| + M_{k-1} <= M + 1e-9
  double tail = 0.0;         // fractional: Tail_inf(h^-) of the rescaled recentred field
  double tail_truncation = 0.0;
  // update-law audit (fractional): constructive centre rho'_k and its increment bound
  std::vector<double> rho_update;
  double increment = 0.0;
  double increment_bound = 0.0;
};

struct CascadeOptions {
  std::array<double, 2> anchor_x{0.0, 0.0};
  double anchor_t = 0.0;
  int max_levels = 12;
  double l = -1.0;  // structural constant for h; negative means l = M
};

struct CascadeReport {
  CascadeMode mode = CascadeMode::local;
  double r = 0.5;
  double s = 1.0;
  double M = 0.0;
  std::array<double, 2> anchor_x{0.0, 0.0};
  double anchor_t = 0.0;
  std::vector<CascadeLevel> levels;
  int max_level = 0;          // deepest resolved level
  bool degenerate = false;    // all M_k below 1e-12
  std::optional<double> alpha_fit;
  double delta_witness = 0.0;
  double C0 = 0.0;            // max_{i<k} |rho_k - rho_i| / (M r^{i alpha})
  double tail_constant = 0.0; // max_k tail_k / (M r^{k alpha})
  bool update_law_ok = true;
};

/// Local mode: cylinders B_{2^-k}(x_a) x (t_a + a_k, t_a + b_k) (r is forced to 1/2, s to 1).
/// Fractional mode: B_{r^k}(x_a) x (t_a - r^{2sk}, t_a]. Levels stop at the first one whose
/// radius is below the grid spacing or whose time window holds fewer than two samples.
CascadeReport oscillation_cascade(const Trajectory& traj, double r, double s, CascadeMode mode,
                                  const CascadeOptions& opt = {});

/// Least-squares slope of log M_k against k log r over levels 2..K-1 (K = deepest level).
/// Empty when fewer than two positive levels remain or the cascade is degenerate.
std::optional<double> fit_alpha(const std::vector<double>& M_k, double r);

struct HolderFit {
  std::optional<double> alpha;
  double al_bound = 0.0;     // min(2s, log_r(1 - delta))
  bool al_ok = false;        // alpha <= al_bound + slack
  bool r_admissible = false; // C r^{2s} < (1 - l)/2
};

HolderFit holder_fit(const CascadeReport& rep, double battery_C, double l, double slack = 0.05);

void write_cascade_csv(const std::filesystem::path& path, const CascadeReport& rep);

}  // namespace fhl
