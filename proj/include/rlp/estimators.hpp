#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rlp {

// ---------------------------------------------------------------------------
// Heavy-tail index estimation
// ---------------------------------------------------------------------------

struct TailEstimate {
  double index = 0.0;      // estimated tail exponent alpha of P(X > x) ~ x^-alpha
  double std_error = 0.0;  // asymptotic standard error, index / sqrt(k)
  std::size_t k = 0;       // number of upper order statistics used
  double threshold = 0.0;  // order statistic the excesses were taken over
};

// Hill estimator on the k largest values.  The estimate is the reciprocal
// mean log-excess over the (k+1)-th order statistic.  Requires strictly
// positive data and 10 <= k < n.
TailEstimate hill_tail_index(const std::vector<double>& values, std::size_t k);

// ---------------------------------------------------------------------------
// Log-log survival-function slope
// ---------------------------------------------------------------------------

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  // Slopes refit on the lower and upper halves of the fitting window.  A
  // straight tail gives matching halves; curvature shows up as disagreement.
  double lower_half_slope = 0.0;
  double upper_half_slope = 0.0;
  bool halves_consistent = false;
  std::size_t n_points = 0;
};

// Least-squares fit of log empirical survival vs log value, restricted to
// data between the lo_quantile and hi_quantile sample quantiles.  Needs at
// least 20 points in the window.
SlopeFit loglog_survival_fit(const std::vector<double>& values,
                             double lo_quantile, double hi_quantile);

// ---------------------------------------------------------------------------
// Two-sample Kolmogorov-Smirnov
// ---------------------------------------------------------------------------

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

// Exact sup-distance between the two empirical CDFs; p-value from the
// asymptotic Kolmogorov distribution with a small-sample correction of the
// effective size.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// ---------------------------------------------------------------------------
// Chi-square goodness of fit against an analytic density
// ---------------------------------------------------------------------------

struct GofResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::size_t bins_used = 0;  // after merging low-expectation bins
};

// Bins samples uniformly over [lo, hi] and compares counts to expectations
// obtained by integrating `density` over each bin.  The density must
// integrate to 1 over [lo, hi] to within 1e-6 -- callers truncating a
// density to a window must renormalize it first.  Adjacent bins are merged
// until every expected count is at least 5.
GofResult histogram_gof(const std::vector<double>& samples,
                        const std::function<double(double)>& density,
                        double lo, double hi, std::size_t n_bins);

// ---------------------------------------------------------------------------
// Box-counting dimension of a time set
// ---------------------------------------------------------------------------

struct DimensionEstimate {
  double dimension = 0.0;
  double r_squared = 0.0;
  std::vector<double> scales;
  std::vector<std::size_t> counts;
};

// Number of distinct boxes of width `scale` meeting the point set, one count
// per scale.  Exposed separately so counts from independent replicas can be
// pooled by summation before the regression.
std::vector<std::size_t> box_counts(const std::vector<double>& times,
                                    const std::vector<double>& scales);

// Regression of log count on log(1/scale).  Requires at least 4 scales
// spanning at least two decades, and positive counts throughout.
DimensionEstimate dimension_from_counts(const std::vector<double>& scales,
                                        const std::vector<std::size_t>& counts);

DimensionEstimate box_counting_dimension(const std::vector<double>& times,
                                         const std::vector<double>& scales);

// ---------------------------------------------------------------------------
// Small sample utilities shared by the statistical tests
// ---------------------------------------------------------------------------

// Linear-interpolation sample quantile of ascending-sorted data, q in [0,1].
double sorted_quantile(const std::vector<double>& sorted_ascending, double q);

// Center by the median and scale by the interquartile range.  Used when two
// samples should agree in shape but carry different nuisance scales.
std::vector<double> robust_standardize(const std::vector<double>& values);

}  // namespace rlp
