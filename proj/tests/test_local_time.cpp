#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "rlp/errors.hpp"
#include "rlp/estimators.hpp"
#include "rlp/gauss_paths.hpp"
#include "rlp/local_time.hpp"
#include "rlp/reflect.hpp"
#include "rlp/rng.hpp"
#include "rlp/stable.hpp"

TEST_SUITE("local_time") {

TEST_CASE("occupation curve counts one-sided band visits exactly") {
  const std::vector<double> w = {0.005, 0.5, -0.1, 0.009, 0.01};
  const rlp::LocalTimeCurve c = rlp::occupation_local_time(w, 0.1, 0.01);
  // in-band samples: k = 0 and k = 3 (w == eps does not count)
  const std::vector<double> want = {10.0, 10.0, 10.0, 20.0, 20.0};
  REQUIRE(c.values.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k)
    CHECK(c.values[k] == doctest::Approx(want[k]).epsilon(1e-15));
  CHECK(c.eps == 0.01);
  CHECK_THROWS_AS(rlp::occupation_local_time(w, 0.1, 0.0),
                  rlp::invalid_argument);
  CHECK_THROWS_AS(rlp::occupation_local_time(w, -0.1, 0.01),
                  rlp::invalid_argument);
}

TEST_CASE("right inverse returns the first strict crossing per level") {
  const std::vector<double> curve = {0.0, 0.0, 1.0, 1.0, 2.0};
  const std::vector<double> levels = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
  const std::vector<std::size_t> idx = rlp::right_inverse(curve, levels);
  const std::vector<std::size_t> want = {2,          2,          4,
                                         4,          rlp::kNoIndex,
                                         rlp::kNoIndex};
  CHECK(idx == want);
  CHECK_THROWS_AS(rlp::right_inverse(curve, {1.0, 0.5}),
                  rlp::invalid_argument);
}

TEST_CASE("occupation estimate reproduces the Brownian local-time mean") {
  // At t = 1 the occupation density of a standard Brownian motion at 0 has
  // mean sqrt(2/pi) = 0.7979 and variance 1 - 2/pi.
  const double h = 1e-4;
  const std::size_t n_steps = 10000;
  const std::size_t replicas = 4000;
  const double eps = 0.02;
  const double sw = std::sqrt(h);
  rlp::RngStream rng(1234);
  double sum = 0.0;
  for (std::size_t r = 0; r < replicas; ++r) {
    double w = 0.0;
    double visits = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
      w += sw * rng.gaussian();
      if (w > 0.0 && w < eps) visits += 1.0;
    }
    sum += visits * h / eps;
  }
  const double mean = sum / static_cast<double>(replicas);
  CHECK(std::abs(mean - std::sqrt(2.0 / M_PI)) < 0.035);
}

TEST_CASE("occupation curve is non-decreasing and matches a direct count") {
  rlp::RngStream rng(9);
  const rlp::PathGrid p = rlp::simulate_kolmogorov(
      50000, 1e-3, 0.0, 0.0, rng, rlp::GenMode::exact_joint);
  const double eps = rlp::kDefaultBandwidthFactor * std::sqrt(1e-3);
  const rlp::LocalTimeCurve c = rlp::occupation_local_time(p.w, 1e-3, eps);
  bool monotone = true;
  std::size_t count = 0;
  for (std::size_t k = 0; k < c.values.size(); ++k) {
    if (k > 0) monotone = monotone && c.values[k] >= c.values[k - 1];
    if (p.w[k] > 0.0 && p.w[k] < eps) ++count;
  }
  CHECK(monotone);
  CHECK(c.values.back() ==
        doctest::Approx(static_cast<double>(count) * 1e-3 / eps));
}

TEST_CASE("inverse-local-time path agrees with a manual reconstruction") {
  rlp::RngStream rng(31);
  const rlp::PathGrid p = rlp::simulate_kolmogorov(
      200000, 1e-3, 0.0, 0.0, rng, rlp::GenMode::exact_joint);
  const rlp::LocalTimeCurve lt =
      rlp::occupation_local_time(p.w, 1e-3, std::sqrt(1e-3));
  const double level_step = 0.05;
  const rlp::TimeChangedStablePath tcs =
      rlp::stable_from_langevin(p, lt, level_step);
  REQUIRE(!tcs.sigma.empty());
  REQUIRE(tcs.local_times.size() == tcs.sigma.size());

  std::vector<double> levels(tcs.local_times.size());
  for (std::size_t i = 0; i < levels.size(); ++i)
    levels[i] = static_cast<double>(i) * level_step;
  const std::vector<std::size_t> tau = rlp::right_inverse(lt.values, levels);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    CHECK(tcs.local_times[i] == levels[i]);
    REQUIRE(tau[i] != rlp::kNoIndex);
    CHECK(tcs.sigma[i] == p.y[tau[i]]);
  }
  // truncation: every reported level lies strictly below the final curve value
  CHECK(tcs.local_times.back() < lt.values.back());

  // a curve that never accrues local time produces an empty path
  rlp::PathGrid flat = p;
  for (double& w : flat.w) w = -1.0;
  const rlp::LocalTimeCurve zero =
      rlp::occupation_local_time(flat.w, 1e-3, 0.01);
  CHECK(rlp::stable_from_langevin(flat, zero, 0.05).sigma.empty());
  CHECK_THROWS_AS(
      rlp::stable_from_langevin(p, rlp::LocalTimeCurve{0.01, {1.0}}, 0.05),
      rlp::invalid_argument);
}

TEST_CASE("position at the inverse local time moves like a stable-1/3 law") {
  // Increments of the integrated path sampled at equally spaced local-time
  // levels are iid symmetric stable-1/3 (strong Markov at the inverse local
  // time).  Pool increments across paths, drop a margin below each path's
  // final level to dodge the truncation bias, then compare the tail index
  // and the standardized shape against a direct stable sampler.
  const double h = 1e-3;
  const std::size_t n_steps = 600000;
  const double level_step = 0.5;
  const std::size_t margin = 10;

  std::vector<double> increments;
  rlp::RngStream rng(2024);
  for (int path = 0; path < 80; ++path) {
    double w = 0.0, y = 0.0;
    const double sw = std::sqrt(h);
    const double sf = std::sqrt(h * h * h / 12.0);
    const double eps = std::sqrt(h);
    double lt = 0.0;
    double next_level = level_step;
    std::vector<double> sigma = {0.0};
    for (std::size_t k = 0; k < n_steps; ++k) {
      const double dw = sw * rng.gaussian();
      y += w * h + 0.5 * h * dw + sf * rng.gaussian();
      w += dw;
      if (w > 0.0 && w < eps) {
        lt += h / eps;
        if (lt > next_level) {
          sigma.push_back(y);
          next_level += level_step;
        }
      }
    }
    if (sigma.size() > margin + 1) {
      for (std::size_t i = 0; i + margin + 1 < sigma.size(); ++i)
        increments.push_back(sigma[i + 1] - sigma[i]);
    }
  }
  REQUIRE(increments.size() > 1500);

  // symmetric: the sign is a fair coin
  double signs = 0.0;
  for (double d : increments) signs += d > 0.0 ? 1.0 : -1.0;
  CHECK(std::abs(signs) / static_cast<double>(increments.size()) <
        4.0 / std::sqrt(static_cast<double>(increments.size())));

  std::vector<double> magnitudes;
  magnitudes.reserve(increments.size());
  for (double d : increments) magnitudes.push_back(std::abs(d));
  const rlp::TailEstimate tail = rlp::hill_tail_index(magnitudes, 100);
  CHECK(tail.index == doctest::Approx(1.0 / 3.0).epsilon(0.30));

  // shape comparison, scale removed by IQR standardization
  rlp::RngStream ref_rng(77);
  const rlp::StableConfig cfg;
  std::vector<double> reference(4000);
  for (double& v : reference)
    v = rlp::sample_stable_increment(cfg, ref_rng);
  const rlp::KsResult ks =
      rlp::ks_two_sample(rlp::robust_standardize(increments),
                         rlp::robust_standardize(reference));
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("velocity-time identity check runs and reports finite error") {
  rlp::RngStream rng(5);
  const rlp::PathGrid p =
      rlp::simulate_kolmogorov(200000, 1e-3, 0.0, 0.0, rng);
  const rlp::ReflectedPath rp = rlp::reflected_process(p);
  const rlp::LocalTimeCurve lt =
      rlp::occupation_local_time(p.w, 1e-3, std::sqrt(1e-3));
  const rlp::VelocityTimeCheck chk =
      rlp::velocity_local_time_check(rp, p, lt, 0.05);
  REQUIRE(chk.n_levels > 0);
  CHECK(chk.lambda.values.size() == rp.kept.size());
  CHECK(std::isfinite(chk.max_discrepancy));
  CHECK(chk.max_discrepancy >= 0.0);
  bool monotone = true;
  for (std::size_t k = 1; k < chk.lambda.values.size(); ++k)
    monotone = monotone && chk.lambda.values[k] >= chk.lambda.values[k - 1];
  CHECK(monotone);
}

}  // TEST_SUITE
