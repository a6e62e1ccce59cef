#pragma once

#include <cstdint>
#include <vector>

#include "rlp/rng.hpp"

namespace rlp {

// Index of the driving stable law.  Everything in this module is specialized
// to the symmetric one-third-stable process; the exit law below has no closed
// form for general indices.
inline constexpr double kStableIndex = 1.0 / 3.0;

struct StableConfig {
  double scale = 1.0;  // spatial scale multiplier
  double step = 1.0;   // time step for one increment
};

enum class ExitSide : std::uint8_t { below, above, none };

// Outcome of one two-sided exit experiment from [0, eps] started at x.
struct ExitRecord {
  double x = 0.0;
  double eps = 0.0;
  ExitSide side = ExitSide::none;
  double position = 0.0;  // location at exit (or last interior point if censored)
  std::uint64_t steps_used = 0;
  bool censored = false;
};

// One symmetric stable-1/3 increment over cfg.step, drawn with the
// Chambers-Mallows-Stuck transform of a uniform and an exponential variate.
// Self-similarity pushes the time step into a cubic spatial factor, so the
// draw is scale * step^3 * S with S standard.
double sample_stable_increment(const StableConfig& cfg, RngStream& rng);

inline constexpr std::uint64_t kDefaultExitStepCap = 100'000'000ULL;

// Random-walk simulation until the path leaves [0, eps].  Jumps dominate the
// exit at this index, so the discretization only biases the landing point
// near the boundary; callers validate with the symmetry invariants.  A walk
// still inside after step_cap increments comes back censored.
ExitRecord exit_interval(double x, double eps, const StableConfig& cfg,
                         RngStream& rng,
                         std::uint64_t step_cap = kDefaultExitStepCap);

// Density of the landing position y > eps when exiting [0, eps] above,
// started from x.  Returns +infinity at y = eps (integrable edge
// singularity); callers integrating across the edge use
// rogozin_exit_probability instead.
double rogozin_density(double x, double eps, double y);

// Mass of the upper-exit event: the density above integrated over
// (eps, infinity) under the substitution u = eps/y, which turns both
// endpoint singularities into Beta-type ones the adaptive rule handles.
double rogozin_exit_probability(double x, double eps);

}  // namespace rlp
