#pragma once

#include <cstddef>
#include <vector>

#include "rlp/gauss_paths.hpp"

namespace rlp {

inline constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

// Maximal run of consecutive grid indices on which the position sits at its
// running infimum (x_tilde == 0), of length >= 2 samples.
struct FlatInterval {
    std::size_t begin = 0;  // first flat index
    std::size_t end = 0;    // last flat index (inclusive)
};

// Path after dropping the time spent at the infimum.
// Arrays are indexed by the reflected clock; kept[k] is the source index the
// k-th reflected sample came from.
struct ReflectedPath {
    double step = 0.0;
    std::vector<double> x;        // reflected position, >= 0
    std::vector<double> v;        // velocity; exactly 0 wherever x == 0
    std::vector<std::size_t> kept;
};

// Running minimum of y, propagating stored values bit-exactly so that later
// equality tests y[k] == inf[k] are exact.
std::vector<double> infimum_process(const std::vector<double>& y);

// x_tilde = y - infimum (zero exactly where y equals its running minimum),
// v_tilde = w where x_tilde > 0, else 0.
struct TildePair {
    std::vector<double> x_tilde;
    std::vector<double> v_tilde;
};
TildePair tilde_process(const PathGrid& path);

// Flat stretches of x_tilde (>= 2 consecutive zeros).  The left endpoint of
// a flat should carry negative velocity; grid-scale violations are counted
// in `left_velocity_violations` rather than treated as fatal.
struct FlatScan {
    std::vector<FlatInterval> flats;
    std::size_t left_velocity_violations = 0;
};
FlatScan flat_intervals(const std::vector<double>& x_tilde,
                        const std::vector<double>& w);

// Indices that survive the time substitution: every index with
// x_tilde > 0 plus the single zero index terminating each positive run.
std::vector<std::size_t> time_substitution(const std::vector<double>& x_tilde);

// Full pipeline: infimum, tilde pair, time substitution.
ReflectedPath reflected_process(const PathGrid& path);

}  // namespace rlp
