#include "rlp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_set>

#include "rlp/errors.hpp"
#include "rlp/quadrature.hpp"

namespace rlp {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0)
    throw degenerate_sample("regression abscissae are all equal");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return out;
}

// Kolmogorov distribution upper tail Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 l^2}.
double kolmogorov_sf(double lambda) {
  if (lambda < 0.3) return 1.0;  // series converges to 1 up from below here
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double sorted_quantile(const std::vector<double>& sorted_ascending, double q) {
  if (sorted_ascending.empty())
    throw invalid_argument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0))
    throw invalid_argument("quantile level outside [0, 1]");
  const std::size_t n = sorted_ascending.size();
  if (n == 1) return sorted_ascending[0];
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted_ascending[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted_ascending[lo] +
         frac * (sorted_ascending[lo + 1] - sorted_ascending[lo]);
}

std::vector<double> robust_standardize(const std::vector<double>& values) {
  if (values.size() < 4)
    throw insufficient_data("need at least 4 points to standardize");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double med = sorted_quantile(sorted, 0.5);
  const double iqr =
      sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  if (!(iqr > 0.0))
    throw degenerate_sample("interquartile range is zero");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = (values[i] - med) / iqr;
  return out;
}

TailEstimate hill_tail_index(const std::vector<double>& values,
                             std::size_t k) {
  const std::size_t n = values.size();
  if (k < 10) throw invalid_argument("hill_tail_index: k must be at least 10");
  if (k >= n)
    throw invalid_argument("hill_tail_index: k must be smaller than the sample");
  std::vector<double> sorted = values;
  for (double v : sorted)
    if (!(v > 0.0))
      throw invalid_argument("hill_tail_index: data must be strictly positive");
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  const double threshold = sorted[k];  // (k+1)-th largest
  double mean_log_excess = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    mean_log_excess += std::log(sorted[i] / threshold);
  mean_log_excess /= static_cast<double>(k);
  if (!(mean_log_excess > 0.0))
    throw degenerate_sample("hill_tail_index: top order statistics are tied");

  TailEstimate est;
  est.index = 1.0 / mean_log_excess;
  est.std_error = est.index / std::sqrt(static_cast<double>(k));
  est.k = k;
  est.threshold = threshold;
  return est;
}

SlopeFit loglog_survival_fit(const std::vector<double>& values,
                             double lo_quantile, double hi_quantile) {
  if (!(lo_quantile >= 0.0 && hi_quantile <= 1.0 && lo_quantile < hi_quantile))
    throw invalid_argument("loglog_survival_fit: bad quantile window");
  std::vector<double> sorted = values;
  for (double v : sorted)
    if (!(v > 0.0))
      throw invalid_argument("loglog_survival_fit: data must be positive");
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n < 40) throw insufficient_data("loglog_survival_fit: sample too small");

  const double lo = sorted_quantile(sorted, lo_quantile);
  const double hi = sorted_quantile(sorted, hi_quantile);

  std::vector<double> lx, ly;
  lx.reserve(n);
  ly.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sorted[i];
    if (x < lo || x > hi) continue;
    const double surv =
        static_cast<double>(n - i) / static_cast<double>(n);  // S(x-) > 0
    // collapse ties: only keep the last (largest-survival is at the first of
    // a tie run; using i of the first occurrence keeps S right-continuous)
    if (i > 0 && sorted[i - 1] == x) continue;
    lx.push_back(std::log(x));
    ly.push_back(std::log(surv));
  }
  if (lx.size() < 20)
    throw insufficient_data("loglog_survival_fit: fewer than 20 usable points");

  SlopeFit out;
  const LineFit full = fit_line(lx, ly);
  out.slope = full.slope;
  out.intercept = full.intercept;
  out.r_squared = full.r_squared;
  out.n_points = lx.size();

  const std::size_t half = lx.size() / 2;
  std::vector<double> lx_lo(lx.begin(), lx.begin() + half);
  std::vector<double> ly_lo(ly.begin(), ly.begin() + half);
  std::vector<double> lx_hi(lx.begin() + half, lx.end());
  std::vector<double> ly_hi(ly.begin() + half, ly.end());
  out.lower_half_slope = fit_line(lx_lo, ly_lo).slope;
  out.upper_half_slope = fit_line(lx_hi, ly_hi).slope;
  out.halves_consistent =
      std::abs(out.lower_half_slope - out.upper_half_slope) <=
      0.5 * std::abs(out.slope) + 0.1;
  return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());

  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }

  const double ne = std::sqrt(na * nb / (na + nb));
  // Stephens' finite-sample adjustment of the asymptotic argument.
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;

  KsResult out;
  out.statistic = d;
  out.p_value = kolmogorov_sf(lambda);
  out.n_a = a.size();
  out.n_b = b.size();
  return out;
}

GofResult histogram_gof(const std::vector<double>& samples,
                        const std::function<double(double)>& density,
                        double lo, double hi, std::size_t n_bins) {
  if (!(hi > lo)) throw invalid_argument("histogram_gof: empty support");
  if (n_bins < 3) throw invalid_argument("histogram_gof: need at least 3 bins");
  if (samples.size() < 5 * n_bins)
    throw insufficient_data("histogram_gof: sample too small for bin count");

  const double total = integrate(density, lo, hi, 1e-9);
  if (std::abs(total - 1.0) > 1e-6)
    throw invalid_argument(
        "histogram_gof: density does not integrate to 1 over the support "
        "(got " +
        std::to_string(total) + "); renormalize before testing");

  const double width = (hi - lo) / static_cast<double>(n_bins);
  std::vector<double> observed(n_bins, 0.0);
  for (double s : samples) {
    if (!(s >= lo && s <= hi))
      throw invalid_argument("histogram_gof: sample outside support");
    auto bin = static_cast<std::size_t>((s - lo) / width);
    if (bin >= n_bins) bin = n_bins - 1;  // right endpoint
    observed[bin] += 1.0;
  }

  const auto n = static_cast<double>(samples.size());
  std::vector<double> expected(n_bins, 0.0);
  for (std::size_t i = 0; i < n_bins; ++i) {
    const double a = lo + width * static_cast<double>(i);
    const double b = (i + 1 == n_bins) ? hi : a + width;
    expected[i] = n * integrate(density, a, b, 1e-9);
  }

  // Merge forward until every expected count reaches 5; fold a trailing
  // light bin back into its neighbor.
  std::vector<double> obs_m, exp_m;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < n_bins; ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= 5.0) {
      obs_m.push_back(o_acc);
      exp_m.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0) {
    if (exp_m.empty()) throw degenerate_sample("histogram_gof: no usable bins");
    obs_m.back() += o_acc;
    exp_m.back() += e_acc;
  }
  if (exp_m.size() < 2)
    throw degenerate_sample("histogram_gof: fewer than 2 bins after merging");

  double chi2 = 0.0;
  for (std::size_t i = 0; i < exp_m.size(); ++i) {
    const double diff = obs_m[i] - exp_m[i];
    chi2 += diff * diff / exp_m[i];
  }

  GofResult out;
  out.statistic = chi2;
  out.bins_used = exp_m.size();
  out.dof = exp_m.size() - 1;
  out.p_value = chisq_sf(chi2, static_cast<unsigned>(out.dof));
  return out;
}

std::vector<std::size_t> box_counts(const std::vector<double>& times,
                                    const std::vector<double>& scales) {
  if (times.empty()) throw invalid_argument("box_counts: empty point set");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw invalid_argument("box_counts: times must be finite and >= 0");
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());

  std::vector<std::size_t> counts;
  counts.reserve(scales.size());
  for (double delta : scales) {
    if (!(delta > 0.0)) throw invalid_argument("box_counts: scale <= 0");
    std::size_t n_boxes = 0;
    std::int64_t last = -1;
    for (double t : sorted) {
      const auto box = static_cast<std::int64_t>(t / delta);
      if (box != last) {
        ++n_boxes;
        last = box;
      }
    }
    counts.push_back(n_boxes);
  }
  return counts;
}

DimensionEstimate dimension_from_counts(
    const std::vector<double>& scales, const std::vector<std::size_t>& counts) {
  if (scales.size() != counts.size())
    throw invalid_argument("dimension_from_counts: size mismatch");
  if (scales.size() < 4)
    throw insufficient_data("dimension_from_counts: need at least 4 scales");
  const auto [lo_it, hi_it] = std::minmax_element(scales.begin(), scales.end());
  if (!(*lo_it > 0.0) || *hi_it / *lo_it < 100.0)
    throw invalid_argument(
        "dimension_from_counts: scales must span at least two decades");

  std::vector<double> lx, ly;
  lx.reserve(scales.size());
  ly.reserve(scales.size());
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (counts[i] == 0)
      throw degenerate_sample("dimension_from_counts: zero count at a scale");
    lx.push_back(-std::log(scales[i]));
    ly.push_back(std::log(static_cast<double>(counts[i])));
  }
  const LineFit fit = fit_line(lx, ly);

  DimensionEstimate out;
  out.dimension = fit.slope;
  out.r_squared = fit.r_squared;
  out.scales = scales;
  out.counts = counts;
  return out;
}

DimensionEstimate box_counting_dimension(const std::vector<double>& times,
                                         const std::vector<double>& scales) {
  return dimension_from_counts(scales, box_counts(times, scales));
}

}  // namespace rlp
