#include <cmath>
#include <vector>

#include "doctest.h"

#include "rlp/errors.hpp"
#include "rlp/gauss_paths.hpp"
#include "rlp/rng.hpp"

TEST_SUITE("gauss_paths") {

TEST_CASE("exact-joint increments carry the closed-form covariance") {
  // Over one step h the pair (dW, dY - w h) is centered gaussian with
  // Var dW = h, Var fluct = h^3/3, Cov = h^2/2.
  const double h = 0.01;
  const std::size_t n = 100000;
  rlp::RngStream rng(101);
  const rlp::PathGrid p =
      rlp::simulate_kolmogorov(n, h, 0.0, 0.0, rng, rlp::GenMode::exact_joint);

  double sww = 0.0, sff = 0.0, swf = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dw = p.w[k + 1] - p.w[k];
    const double fl = p.y[k + 1] - p.y[k] - p.w[k] * h;
    sww += dw * dw;
    sff += fl * fl;
    swf += dw * fl;
  }
  const double nn = static_cast<double>(n);
  const double var_w = sww / nn;
  const double var_f = sff / nn;
  const double cov = swf / nn;

  // 4-standard-error bands; the summands are products of gaussians, so
  // Var(dW^2) = 2h^2, Var(fluct^2) = 2(h^3/3)^2, and
  // Var(dW*fluct) = h*(h^3/3) + (h^2/2)^2.
  CHECK(std::abs(var_w - h) < 4.0 * h * std::sqrt(2.0 / nn));
  const double vf = h * h * h / 3.0;
  CHECK(std::abs(var_f - vf) < 4.0 * vf * std::sqrt(2.0 / nn));
  const double sd_cov = std::sqrt((h * vf + 0.25 * h * h * h * h) / nn);
  CHECK(std::abs(cov - 0.5 * h * h) < 4.0 * sd_cov);
}

TEST_CASE("bridge velocity is a Wiener path on the grid") {
  const double h = 0.004;
  const std::size_t n = 50000;
  rlp::RngStream rng(55);
  const rlp::PathGrid p =
      rlp::simulate_kolmogorov(n, h, 0.0, 0.0, rng, rlp::GenMode::bridge);
  REQUIRE(p.w.size() == n + 1);
  CHECK(p.w[0] == 0.0);

  double sww = 0.0, lag = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dw = p.w[k + 1] - p.w[k];
    sww += dw * dw;
    if (k > 0) lag += dw * (p.w[k] - p.w[k - 1]);
  }
  const double nn = static_cast<double>(n);
  CHECK(std::abs(sww / nn - h) < 4.0 * h * std::sqrt(2.0 / nn));
  CHECK(std::abs(lag / nn) < 4.0 * h / std::sqrt(nn));  // independent steps
}

TEST_CASE("bridge refinement reproduces coarse velocities bit-for-bit") {
  const double h = 0.01;
  for (std::size_t n : {3ul, 6ul, 40ul, 1000ul}) {
    rlp::RngStream r1(9), r2(9), r4(9);
    const rlp::PathGrid a = rlp::simulate_kolmogorov(n, h, 0.0, 0.3, r1);
    const rlp::PathGrid b =
        rlp::simulate_kolmogorov(2 * n, h / 2.0, 0.0, 0.3, r2);
    const rlp::PathGrid c =
        rlp::simulate_kolmogorov(4 * n, h / 4.0, 0.0, 0.3, r4);
    bool match2 = true, match4 = true;
    for (std::size_t k = 0; k <= n; ++k) {
      match2 = match2 && (b.w[2 * k] == a.w[k]);
      match4 = match4 && (c.w[4 * k] == a.w[k]);
    }
    CHECK(match2);
    CHECK(match4);
  }
}

TEST_CASE("bridge positions converge under refinement") {
  // The trapezoid integral differs between levels; the gap must shrink.
  const double h = 0.02;
  const std::size_t n = 2000;
  rlp::RngStream r1(77), r2(77), r3(77);
  const rlp::PathGrid a = rlp::simulate_kolmogorov(n, h, 0.0, 0.0, r1);
  const rlp::PathGrid b = rlp::simulate_kolmogorov(2 * n, h / 2, 0.0, 0.0, r2);
  const rlp::PathGrid c = rlp::simulate_kolmogorov(4 * n, h / 4, 0.0, 0.0, r3);
  double d_ab = 0.0, d_bc = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    d_ab = std::max(d_ab, std::abs(a.y[k] - b.y[2 * k]));
    d_bc = std::max(d_bc, std::abs(b.y[2 * k] - c.y[4 * k]));
  }
  CHECK(d_ab > 0.0);
  CHECK(d_bc < d_ab);
}

TEST_CASE("disabling the noise yields the deterministic drift line") {
  rlp::RngStream rng(1);
  const double h = 0.125, v0 = -2.0;
  const rlp::PathGrid p = rlp::simulate_kolmogorov(
      64, h, 5.0, v0, rng, rlp::GenMode::exact_joint, false);
  bool w_const = true, y_linear = true;
  for (std::size_t k = 0; k < p.w.size(); ++k) {
    w_const = w_const && (p.w[k] == v0);
    y_linear = y_linear &&
               std::abs(p.y[k] - (5.0 + v0 * static_cast<double>(k) * h)) <
                   1e-12;
  }
  CHECK(w_const);
  CHECK(y_linear);
}

TEST_CASE("horizon cap rejects oversized runs") {
  rlp::RngStream rng(2);
  CHECK_THROWS_AS(rlp::simulate_kolmogorov(20, 1.0, 0.0, 0.0, rng,
                                           rlp::GenMode::exact_joint, true,
                                           10.0),
                  rlp::resource_limit);
  CHECK_THROWS_AS(rlp::simulate_kolmogorov(0, 1.0, 0.0, 0.0, rng),
                  rlp::invalid_argument);
}

TEST_CASE("stopped run without noise hits zero at the exact linear time") {
  rlp::RngStream rng(3);
  const rlp::StoppedPath sp =
      rlp::simulate_stopped_langevin(1.0, -1.0, 0.25, rng, 100.0, false);
  CHECK(sp.lifetime == 1.0);
  CHECK_FALSE(sp.censored);
  CHECK(sp.path.y.back() == 0.0);

  // sub-step interpolation: crossing between grid points
  rlp::RngStream rng2(3);
  const rlp::StoppedPath sp2 =
      rlp::simulate_stopped_langevin(1.0, -1.0, 0.4, rng2, 100.0, false);
  CHECK(sp2.lifetime == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sp2.path.y.back() < 0.0);
}

TEST_CASE("stopped run with noise ends at the first non-positive sample") {
  rlp::RngStream rng(17);
  const rlp::StoppedPath sp =
      rlp::simulate_stopped_langevin(0.25, 0.0, 1e-3, rng, 1e6);
  REQUIRE(sp.path.w.size() == sp.path.y.size());
  CHECK_FALSE(sp.censored);
  CHECK(sp.path.y.back() <= 0.0);
  bool interior_positive = true;
  for (std::size_t k = 0; k + 1 < sp.path.y.size(); ++k)
    interior_positive = interior_positive && sp.path.y[k] > 0.0;
  CHECK(interior_positive);
  CHECK(sp.lifetime > 0.0);
  CHECK(sp.lifetime <= sp.path.horizon());
}

TEST_CASE("tiny horizon cap censors a stopped run") {
  rlp::RngStream rng(19);
  const rlp::StoppedPath sp =
      rlp::simulate_stopped_langevin(100.0, 0.0, 0.01, rng, 0.5);
  CHECK(sp.censored);
  CHECK(sp.lifetime == doctest::Approx(0.5));
}

TEST_CASE("streaming chain matches the materialized exact-joint path") {
  const double h = 0.01;
  const std::size_t n = 2000;
  rlp::RngStream r1(31), r2(31);
  const rlp::PathGrid p = rlp::simulate_kolmogorov(
      n, h, 2.0, -0.5, r1, rlp::GenMode::exact_joint);
  rlp::KolmogorovStream s(h, 2.0, -0.5, r2);
  double max_rel = 0.0;
  bool w_match = true;
  for (std::size_t k = 0;; ++k) {
    w_match = w_match && (s.w() == p.w[k]);
    max_rel = std::max(max_rel, std::abs(s.y() - p.y[k]) /
                                    std::max(1.0, std::abs(p.y[k])));
    if (k == n) break;
    s.advance();
  }
  CHECK(w_match);           // identical draw order and arithmetic
  CHECK(max_rel < 1e-12);   // y accumulates in a different association order
}

TEST_CASE("bounce folds the position and is idempotent") {
  rlp::RngStream rng(83);
  const rlp::PathGrid p = rlp::simulate_kolmogorov(
      5000, 0.01, 0.0, 0.0, rng, rlp::GenMode::exact_joint);
  const rlp::PathGrid b = rlp::bounce_path(p);
  bool folded = true, flipped = true;
  for (std::size_t k = 0; k < p.y.size(); ++k) {
    folded = folded && (b.y[k] == std::fabs(p.y[k]));
    flipped = flipped && (b.w[k] == (p.y[k] < 0.0 ? -p.w[k] : p.w[k]));
  }
  CHECK(folded);
  CHECK(flipped);
  const rlp::PathGrid bb = rlp::bounce_path(b);
  bool idem = true;
  for (std::size_t k = 0; k < b.y.size(); ++k)
    idem = idem && (bb.y[k] == b.y[k]) && (bb.w[k] == b.w[k]);
  CHECK(idem);
}

TEST_CASE("block-rescaled lifetime sampler agrees on deterministic input") {
  rlp::RngStream rng(4);
  // No noise cannot be used here (the sampler always draws), so check the
  // law-free properties instead: strictly positive samples, censoring only
  // via the explicit guard, and exact equality with the plain sampler when
  // absorption happens inside the first block.
  rlp::RngStream r1(12), r2(12);
  const rlp::LifetimeSample direct = rlp::stopped_lifetime(1.0, 0.0, 0.01, r1, 40.0);
  const rlp::LifetimeSample blocked =
      rlp::stopped_lifetime_rescaled(1.0, 0.0, 0.01, r2, 40.0);
  if (!direct.censored) {
    CHECK_FALSE(blocked.censored);
    CHECK(blocked.zeta == direct.zeta);
  }

  int censored = 0;
  for (int i = 0; i < 200; ++i) {
    const rlp::LifetimeSample s =
        rlp::stopped_lifetime_rescaled(1.0, 0.0, 0.02, rng);
    CHECK(s.zeta > 0.0);
    if (s.censored) ++censored;
  }
  CHECK(censored == 0);  // 400 blocks of 40 reach astronomically far tails
}

TEST_CASE("rescaled lifetime from a^{3/2} on grid a*h is exactly a times the unit run") {
  // Couple the two runs on the same gaussian stream.  Every quantity in the
  // scaled run is a power-of-two multiple of its unit-run counterpart, the
  // restart states coincide bit for bit once the grids merge at rep_step,
  // and the crossing interpolation is scale free, so the lifetimes agree
  // exactly, not just in law.
  const double h = 0.02, a = 4.0;
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    rlp::RngStream ru(31, rep), rs(31, rep);
    const rlp::LifetimeSample unit =
        rlp::stopped_lifetime_rescaled(1.0, 0.0, h, ru, 0.8, 400, h);
    const rlp::LifetimeSample scaled = rlp::stopped_lifetime_rescaled(
        std::pow(a, 1.5), 0.0, a * h, rs, a * 0.8, 400, h);
    CHECK(unit.censored == scaled.censored);
    CHECK(scaled.zeta == a * unit.zeta);
  }
}

TEST_CASE("rescaled lifetimes reach far beyond one uniform-grid horizon") {
  rlp::RngStream rng(6);
  double longest = 0.0;
  for (int i = 0; i < 300; ++i)
    longest = std::max(longest,
                       rlp::stopped_lifetime_rescaled(1.0, 0.0, 0.02, rng).zeta);
  // P(zeta > 1e4) per draw is roughly c * 1e-1; 300 draws clear it easily,
  // while a uniform grid with the same step budget stops near t = 40.
  CHECK(longest > 100.0);
}

}  // TEST_SUITE
