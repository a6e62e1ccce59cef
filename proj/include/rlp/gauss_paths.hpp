#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rlp/rng.hpp"

namespace rlp {

// Uniform-step sample of the driving pair (velocity, position):
//   w[k] = v0 + W(k*step)          (W standard Wiener)
//   y[k] = x0 + integral of w      (position of the free particle)
struct PathGrid {
    double step = 0.0;
    std::vector<double> w;
    std::vector<double> y;

    std::size_t n_steps() const { return w.empty() ? 0 : w.size() - 1; }
    double horizon() const { return static_cast<double>(n_steps()) * step; }
};

enum class GenMode {
    // Dyadic bridge: the Wiener points are built level by level, so a rerun
    // with the same seed and half the step reproduces the coarse grid values
    // bit-for-bit (position integrals use the trapezoid rule and converge
    // only as the grid refines).
    bridge,
    // Joint exact draw of (dW, dY) per step: Var dW = h, Var dY = h^3/3,
    // Cov = h^2/2.  Position marginals are exact at grid times; no
    // refinement property.
    exact_joint,
};

inline constexpr double kDefaultHorizonCap = 1e8;

// Free (unreflected) particle over n_steps uniform steps.
// with_noise=false zeroes every gaussian: w = v0, y = x0 + v0*t.
PathGrid simulate_kolmogorov(std::size_t n_steps, double step, double x0,
                             double v0, RngStream& rng,
                             GenMode mode = GenMode::bridge,
                             bool with_noise = true,
                             double horizon_cap = kDefaultHorizonCap);

struct StoppedPath {
    PathGrid path;
    double lifetime = 0.0;  // sub-step hitting time by linear interpolation
    bool censored = false;  // horizon cap reached before the level crossing
};

// Particle from (x, v0), absorbed at the first crossing of position level 0.
// The recorded path ends at the first grid point at or below 0 (its final
// sample is the overshoot); `lifetime` interpolates the crossing inside the
// final step.  Censored runs report lifetime = elapsed horizon.
StoppedPath simulate_stopped_langevin(double x, double v0, double step,
                                      RngStream& rng,
                                      double horizon_cap = kDefaultHorizonCap,
                                      bool with_noise = true);

// Sign-flip comparison object: position folded to |y|, velocity flipped on
// the negative excursions.  Idempotent.
PathGrid bounce_path(const PathGrid& path);

// Streaming generator of the exact-joint chain; O(1) memory for long
// ensemble runs where the path itself is never materialised.
class KolmogorovStream {
  public:
    KolmogorovStream(double step, double x0, double v0, RngStream& rng)
        : h_(step), w_(v0), y_(x0), rng_(&rng) {}

    void advance() {
        const double dw = sw_ * rng_->gaussian();
        y_ += w_ * h_ + 0.5 * h_ * dw + sf_ * rng_->gaussian();
        w_ += dw;
    }

    double w() const { return w_; }
    double y() const { return y_; }

  private:
    double h_;
    double w_;
    double y_;
    RngStream* rng_;
    double sw_ = std::sqrt(h_);
    double sf_ = std::sqrt(h_ * h_ * h_ / 12.0);
};

struct LifetimeSample {
    double zeta = 0.0;
    bool censored = false;
};

// Absorption time only (no path retention), uniform grid, hard horizon cap.
LifetimeSample stopped_lifetime(double x, double v0, double step,
                                RngStream& rng, double horizon_cap);

// Absorption time via self-similar block continuation.  The chain runs at
// most `block_time` per block; a surviving block is restarted from position
// 1 with state (1, v * x^{-1/3}) and the clock multiplier grows by x^{2/3},
// which is exact in law for this process and acts as an adaptive step far
// from the boundary.  The power-law lifetime tail (no finite mean) is
// unreachable on a single uniform grid; this sampler reaches it in
// O(log zeta) blocks.
//
// rep_step > 0 switches the grid to rep_step after the first rescale (the
// number of steps per block stays floor(block_time / step)).  Starting from
// (a^{3/2}, 0) at step a * rep_step with block_time scaled by a then matches
// the run from (1, 0) at rep_step block for block: the first blocks map onto
// each other under the exact rescaling y -> a^{3/2} y, t -> a t, and both
// runs continue from identical restart states on the identical grid, so the
// two lifetimes agree up to the exact factor a.  rep_step = 0 keeps `step`
// throughout.
LifetimeSample stopped_lifetime_rescaled(double x, double v0, double step,
                                         RngStream& rng,
                                         double block_time = 40.0,
                                         int max_blocks = 400,
                                         double rep_step = 0.0);

}  // namespace rlp
