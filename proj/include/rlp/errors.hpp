#pragma once

#include <stdexcept>
#include <string>

namespace rlp {

// Bad caller input (out-of-range parameter, size mismatch, unordered bounds).
struct invalid_argument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A run would exceed a configured budget (horizon, step cap, recursion depth).
struct resource_limit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical routine failed to reach its tolerance.
struct numeric_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A statistic cannot be formed from the sample handed in (ties, emptiness).
struct degenerate_sample : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fewer data points than the estimator needs.
struct insufficient_data : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent manifest / CLI configuration.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rlp
