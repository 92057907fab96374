#pragma once

#include <array>
#include <cstddef>

#include "fhl/field.hpp"

namespace fhl {

struct RegionStats {
  double l1_avg = 0.0;
  double inf = 0.0;
  double sup = 0.0;
  double integral = 0.0;  // unnormalized midpoint integral over Q
  std::size_t samples = 0;
};

/// Statistics of a scalar space-time field over the cylinder Q.
/// Each sample is weighted by the fraction of its cell [x-h/2, x+h/2] x [t-dt/2, t+dt/2]
/// lying in Q; inf/sup run over samples whose centre lies in Q.
/// Throws EmptyRegionError when no sample lies in Q.
RegionStats region_stats(const SpaceTimeField& f, const Cylinder& q);

/// Fraction of the spatial cell around sample p inside the ball B_r(x0).
double cell_fraction_in_ball(const Grid& g, std::size_t p, std::array<double, 2> x0, double r);
/// Fraction of the time cell around sample j inside (lo, hi).
double cell_fraction_in_interval(const Grid& g, int j, double lo, double hi);

}  // namespace fhl
