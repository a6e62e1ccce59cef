#pragma once

#include <cstddef>
#include <vector>

#include "rlp/gauss_paths.hpp"
#include "rlp/reflect.hpp"

namespace rlp {

// Occupation-density estimate of the local time of the velocity at 0,
// accumulated along the grid.  eps is the occupation bandwidth.
struct LocalTimeCurve {
  double eps = 0.0;
  std::vector<double> values;  // non-decreasing, one entry per grid index
};

// kDefaultBandwidthFactor * sqrt(step) is the default occupation bandwidth:
// sqrt(step) is the spatial scale at which the discrete occupation density
// stabilizes, and the factor is exposed as a knob.
inline constexpr double kDefaultBandwidthFactor = 1.0;
inline constexpr double kDefaultLevelStep = 0.01;

// The integrated path viewed on an equispaced local-time grid.
struct TimeChangedStablePath {
  std::vector<double> local_times;  // strictly increasing level grid
  std::vector<double> sigma;        // position at the inverse-local-time index
};

// values[k] = (step/eps) * #{ j <= k : 0 < w[j] < eps }.  The occupation
// window is one-sided by definition of the underlying local time.
LocalTimeCurve occupation_local_time(const std::vector<double>& w, double step,
                                     double eps);

// For each level, the smallest index k with curve[k] > level; kNoIndex once
// the curve is exhausted.  Levels must be non-decreasing (two-pointer scan).
std::vector<std::size_t> right_inverse(const std::vector<double>& curve,
                                       const std::vector<double>& levels);

// Evaluates the integrated path at the right inverse of the local-time curve
// on the grid 0, level_step, 2*level_step, ...; truncates when the curve is
// exhausted.  An identically-zero curve produces an empty result.  The level-0
// entry is exact only in the continuum; on a grid it carries the usual
// occupation-estimator error when the path starts at the origin.
TimeChangedStablePath stable_from_langevin(const PathGrid& path,
                                           const LocalTimeCurve& lt,
                                           double level_step);

struct VelocityTimeCheck {
  LocalTimeCurve lambda;         // lt pulled back onto the reflected clock
  double max_discrepancy = 0.0;  // sup over levels of the identity residual
  std::size_t n_levels = 0;
};

// Checks that the local-time curve, restricted to the reflected clock,
// serves as a local time for the reflected velocity: the reflected position
// viewed at the inverse of lambda must equal sigma minus its running infimum
// on the shared level grid.  The identity is exact in the continuum, so the
// returned discrepancy measures pure estimator error and must shrink under
// grid refinement.
VelocityTimeCheck velocity_local_time_check(const ReflectedPath& rp,
                                            const PathGrid& path,
                                            const LocalTimeCurve& lt,
                                            double level_step);

}  // namespace rlp
