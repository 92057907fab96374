#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fhl/field.hpp"
#include "fhl/master_operator.hpp"
#include "fhl/region.hpp"

namespace fhl {

/// Interior audit window: samples outside the outer 10% of the box in every
/// space direction and of the time window.
bool in_audit_interior(const Grid& g, int j, std::size_t p);

struct TailResult {
  double value = 0.0;
  double truncation_bound = 0.0;  // exterior beyond the box, with |v| <= outer-shell sup there
};

/// R^{2s} sup_{t1 < t_j <= t2} integral over the union of grid cells outside B_R(x0) of
/// |v(x, t_j)| / |x - x0|^{n+2s}. In 1-D each cell is integrated exactly against the
/// kernel; in 2-D with 8 x 8 sub-cell midpoints.
TailResult tail_infty(const SpaceTimeField& v, std::array<double, 2> x0, double R, double t1, double t2, double s);

/// Per-cell weights of the tail integral (without the R^{2s} factor) on a spatial grid,
/// plus the kernel mass of the exterior beyond the box.
struct TailWeights {
  std::vector<double> cell;
  double outside = 0.0;
};
TailWeights tail_weights(const Grid& g, std::array<double, 2> x0, double R, double s);

struct HarnackReport {
  std::string theorem_id;
  double l1_avg = 0.0;     // average over U^- (integral for the master form)
  double inf_plus = 0.0;
  double tail = 0.0;       // Tail_inf(v^-) (fractional form)
  double tail_term = 0.0;  // (r/R)^{2s} tail
  double ratio = 0.0;      // l1_avg / (inf_plus + tail_term)
  Cylinder minus, plus;
  double s = 1.0, r = 1.0, R = 0.0;
  double residual_audit = 0.0;  // min over audited samples of residual / scale
  bool audit_ok = true;
  double truncation_bound = 0.0;
  double wk_ratio = 0.0;  // master form: min over probes of v(xi, t) / integral of v over the (wk) region
};

inline constexpr double kAuditTolerance = 1e-3;
inline constexpr double kNegativityTolerance = 1e-10;

/// B_1 x (-1, -1/3) against B_1 x (0, 1/2); audit d_t v - Delta v >= -tol.
HarnackReport harnack_report_local(const SpaceTimeField& v);

/// U^- = B_r(x0) x (t0 - 2r^{2s}, t0 - r^{2s}], U^+ = B_r(x0) x (t0 - r^{2s}/2, t0].
/// Requires r < R/2 and v >= 0 on B_R(x0) x (t0 - 2r^{2s}, t0]; audits
/// d_t v + (-Delta)^s v >= -tol there.
HarnackReport harnack_report_fractional(const SpaceTimeField& v, std::array<double, 2> x0, double t0, double r, double R,
                                        double s);

/// U^- = B_{1/2} x (-1, -1/2), U^+ = B_{1/2} x (-1/4, 0); requires v >= 0 on the whole
/// window and audits H^s v >= -tol (causal, with the given history).
HarnackReport harnack_report_master(const SpaceTimeField& v, double s, History history = History::caloric);

struct CaffarelliResult {
  SpaceTimeField h;
  double h_min = 0.0;
  double residual_min = 0.0;  // min interior residual / scale
  double scale = 0.0;
  bool ok = false;
};

enum class FlowKind { local, fractional };

/// h = M^2/2 + (1 - l) M - |u|^2/2 - xi.u with the supersolution audit of the
/// selected operator (time derivative by centred differences).
CaffarelliResult caffarelli_h(const SpaceTimeField& u, std::array<double, 3> xi, double M, double l,
                              FlowKind kind = FlowKind::local, double s = 0.5);

/// Samples of a trajectory as a space-time field (uniform spacing required).
SpaceTimeField space_time_from(const std::vector<Field>& frames, double dt);

struct BatteryMember {
  std::string id;
  SpaceTimeField v;
  History history = History::caloric;
};

struct Battery {
  std::string battery_id;
  std::string theorem_id;  // local | fractional | master
  double s = 1.0;
  int N = 0;
  std::vector<BatteryMember> members;
};

inline constexpr const char* kBatteryVersion = "battery-v1";

/// Fixed member list of the versioned battery for one theorem at spatial resolution N.
Battery build_battery(const std::string& theorem_id, double s, int N);

struct BatteryResult {
  Battery battery;
  std::vector<HarnackReport> reports;
  double ratio_cap = 0.0;
  bool audits_ok = true;
};

BatteryResult run_battery(const Battery& b);

void write_report_csv(const std::filesystem::path& path, const BatteryResult& res);
void write_battery_manifest(const std::filesystem::path& path, const Battery& b);

}  // namespace fhl
