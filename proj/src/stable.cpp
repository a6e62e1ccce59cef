#include "rlp/stable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rlp/errors.hpp"
#include "rlp/quadrature.hpp"

namespace rlp {

namespace {

void check_config(const StableConfig& cfg) {
  if (!(cfg.scale > 0.0) || !std::isfinite(cfg.scale))
    throw invalid_argument("stable: scale must be positive and finite");
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step))
    throw invalid_argument("stable: step must be positive and finite");
}

}  // namespace

double sample_stable_increment(const StableConfig& cfg, RngStream& rng) {
  check_config(cfg);
  // uniform() is strictly inside (0,1), so U avoids the poles at +-pi/2.
  const double u = std::numbers::pi * (rng.uniform() - 0.5);
  const double e = rng.exponential();
  const double cu = std::cos(u);
  // alpha = 1/3: sin(alpha u) / cos(u)^(1/alpha) * (cos((1-alpha)u)/E)^((1-alpha)/alpha)
  const double ratio = std::cos(2.0 * u / 3.0) / e;
  const double s = std::sin(u / 3.0) / (cu * cu * cu) * ratio * ratio;
  return cfg.scale * cfg.step * cfg.step * cfg.step * s;
}

ExitRecord exit_interval(double x, double eps, const StableConfig& cfg,
                         RngStream& rng, std::uint64_t step_cap) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw invalid_argument("exit_interval: eps must be positive and finite");
  if (!(x > 0.0 && x < eps))
    throw invalid_argument("exit_interval: start must lie strictly inside (0, eps)");
  check_config(cfg);

  ExitRecord rec;
  rec.x = x;
  rec.eps = eps;

  double pos = x;
  for (std::uint64_t n = 0; n < step_cap; ++n) {
    pos += sample_stable_increment(cfg, rng);
    if (pos < 0.0 || pos > eps) {
      rec.side = pos > eps ? ExitSide::above : ExitSide::below;
      rec.position = pos;
      rec.steps_used = n + 1;
      return rec;
    }
  }
  rec.side = ExitSide::none;
  rec.position = pos;
  rec.steps_used = step_cap;
  rec.censored = true;
  return rec;
}

double rogozin_density(double x, double eps, double y) {
  if (!(eps > 0.0) || !(x > 0.0 && x < eps))
    throw invalid_argument("rogozin_density: need 0 < x < eps");
  if (!(y >= eps))
    throw invalid_argument("rogozin_density: need y >= eps");
  if (y == eps) return std::numeric_limits<double>::infinity();

  const double sixth = 1.0 / 6.0;
  return 0.5 / std::numbers::pi * std::pow(x, sixth) *
         std::pow(eps - x, sixth) * std::pow(y - eps, -sixth) *
         std::pow(y, -sixth) / (y - x);
}

double rogozin_exit_probability(double x, double eps) {
  if (!(eps > 0.0) || !(x > 0.0 && x < eps))
    throw invalid_argument("rogozin_exit_probability: need 0 < x < eps");

  // u = eps / y maps (eps, inf) to (0, 1); the integrand picks up the
  // Jacobian eps/u^2 and becomes Beta-like: u^{-2/3} (1-u)^{-1/6} smooth-rest.
  const double sixth = 1.0 / 6.0;
  const double front = 0.5 / std::numbers::pi * std::pow(x, sixth) *
                       std::pow(eps - x, sixth) * std::pow(eps, 2.0 / 3.0);
  auto integrand = [&](double u) {
    return front * std::pow(1.0 - u, -sixth) * std::pow(u, -2.0 / 3.0) /
           (eps - x * u);
  };
  const double p = integrate(integrand, 0.0, 1.0, 1e-10);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace rlp
