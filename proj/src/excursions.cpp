#include "rlp/excursions.hpp"

#include <algorithm>
#include <cmath>

#include "rlp/errors.hpp"
#include "rlp/gauss_paths.hpp"

namespace rlp {

ExcursionSet extract_excursions(const ReflectedPath& rp, double min_height) {
  if (!(rp.step > 0.0))
    throw invalid_argument("extract_excursions: path step must be positive");
  if (rp.x.size() != rp.v.size())
    throw invalid_argument("extract_excursions: malformed reflected path");
  if (min_height < 0.0)
    throw invalid_argument("extract_excursions: min_height must be >= 0");

  ExcursionSet out;
  const std::vector<double>& x = rp.x;
  const std::vector<double>& v = rp.v;
  const double h = rp.step;
  const std::size_t m = x.size();

  std::size_t i = 0;
  while (i < m) {
    if (!(x[i] > 0.0)) {  // stray zero (only terminators occur here)
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < m && x[j] > 0.0) ++j;
    if (j == m) {
      // Run still open at the horizon: censored, not an excursion.
      out.censored_count += 1;
      out.censored_duration = static_cast<double>(j - i) * h;
      break;
    }

    const std::size_t n_int = j - i;
    Excursion exc;
    exc.step = h;
    exc.start_time = (i == 0) ? 0.0 : h * static_cast<double>(i - 1);
    exc.zeta = h * static_cast<double>(n_int + 1);
    exc.x_samples.reserve(n_int + 2);
    exc.v_samples.reserve(n_int + 2);
    exc.x_samples.push_back(0.0);
    exc.v_samples.push_back(0.0);
    double height = 0.0;
    std::size_t d_idx = n_int;  // closing zero counts as a velocity zero
    for (std::size_t k = i; k < j; ++k) {
      exc.x_samples.push_back(x[k]);
      exc.v_samples.push_back(v[k]);
      height = std::max(height, x[k]);
      if (d_idx == n_int && !(v[k] > 0.0)) d_idx = k - i;
    }
    exc.x_samples.push_back(x[j]);  // exact 0
    exc.v_samples.push_back(v[j]);  // exact 0
    exc.height = height;
    exc.v_end = v[j - 1];
    exc.d_first_zero = h * static_cast<double>(d_idx);

    if (min_height > 0.0 && height < min_height)
      out.discarded_count += 1;
    else
      out.excursions.push_back(std::move(exc));
    i = j + 1;
  }
  return out;
}

ExcursionTails excursion_tails(const std::vector<Excursion>& excs) {
  if (excs.empty())
    throw invalid_argument("excursion_tails: empty excursion list");
  ExcursionTails t;
  t.heights.name = "heights";
  t.lifetimes.name = "lifetimes";
  t.terminal_speeds.name = "terminal_speeds";
  t.heights.values.reserve(excs.size());
  t.lifetimes.values.reserve(excs.size());
  t.terminal_speeds.values.reserve(excs.size());
  for (const Excursion& e : excs) {
    t.heights.values.push_back(e.height);
    t.lifetimes.values.push_back(e.zeta);
    const double speed = std::abs(e.v_end);
    if (speed > 0.0) t.terminal_speeds.values.push_back(speed);
  }
  return t;
}

double first_zero_of_velocity(const Excursion& exc) {
  if (exc.v_samples.size() < 2 || !(exc.step > 0.0))
    throw invalid_argument("first_zero_of_velocity: malformed excursion");
  for (std::size_t k = 1; k < exc.v_samples.size(); ++k)
    if (!(exc.v_samples[k] > 0.0))
      return exc.step * static_cast<double>(k - 1);
  return exc.zeta;  // unreachable for well-formed excursions
}

std::optional<RhoPassage> rho_passage(const Excursion& exc, double eps) {
  if (!(eps > 0.0)) throw invalid_argument("rho_passage: eps must be positive");
  const std::size_t n = exc.x_samples.size();
  std::size_t reached = n;
  for (std::size_t k = 1; k < n; ++k) {
    if (exc.x_samples[k] >= eps) {
      reached = k;
      break;
    }
  }
  if (reached == n) return std::nullopt;  // height below eps
  for (std::size_t k = reached; k < n; ++k) {
    if (!(exc.v_samples[k] > 0.0)) {
      RhoPassage rp;
      rp.rho = exc.step * static_cast<double>(k);
      rp.e_at_rho = exc.x_samples[k];
      return rp;
    }
  }
  return std::nullopt;  // no velocity zero recorded (malformed input)
}

EnergyLedger energy_process(const std::vector<Excursion>& excs) {
  EnergyLedger ledger;
  ledger.times.reserve(excs.size());
  ledger.jumps.reserve(excs.size());
  double prev = -1.0;
  for (const Excursion& e : excs) {
    const double t = e.start_time + e.zeta;
    if (t < prev)
      throw invalid_argument("energy_process: excursions not in time order");
    prev = t;
    ledger.times.push_back(t);
    ledger.jumps.push_back(0.5 * e.v_end * e.v_end);
  }
  return ledger;
}

std::vector<EntrancePoint> entrance_scaling_probe(
    const std::vector<double>& xs, double threshold, std::size_t replicas,
    double step, RngStream& rng, bool with_noise, std::size_t max_steps) {
  if (!(threshold > 0.0))
    throw invalid_argument("entrance_scaling_probe: threshold must be positive");
  if (!(step > 0.0))
    throw invalid_argument("entrance_scaling_probe: step must be positive");
  if (replicas == 0)
    throw invalid_argument("entrance_scaling_probe: need at least one replica");

  const double sw = std::sqrt(step);
  const double sf = std::sqrt(step * step * step / 12.0);

  std::vector<EntrancePoint> out;
  out.reserve(xs.size());
  for (double x : xs) {
    if (!(x > 0.0))
      throw invalid_argument("entrance_scaling_probe: start heights must be positive");
    if (x >= threshold) {
      out.push_back({x, 1.0});  // already at or above the target level
      continue;
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < replicas; ++r) {
      double w = 0.0;
      double y = x;
      for (std::size_t n = 0; n < max_steps; ++n) {
        if (with_noise) {
          const double dw = sw * rng.gaussian();
          y += w * step + 0.5 * step * dw + sf * rng.gaussian();
          w += dw;
        } else {
          y += w * step;
        }
        if (y <= 0.0) break;
        if (y >= threshold) {
          ++hits;
          break;
        }
      }
      // running out of steps counts as a failure to reach the level
    }
    out.push_back(
        {x, static_cast<double>(hits) / static_cast<double>(replicas)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// ExcursionHarvester
// ---------------------------------------------------------------------------

ExcursionHarvester::ExcursionHarvester(double step, Options opts)
    : step_(step), opts_(std::move(opts)) {
  if (!(step_ > 0.0))
    throw invalid_argument("ExcursionHarvester: step must be positive");
  for (double eps : opts_.rho_eps)
    if (!(eps > 0.0))
      throw invalid_argument("ExcursionHarvester: rho levels must be positive");
  rho_state_.resize(opts_.rho_eps.size());
  rho_samples_.resize(opts_.rho_eps.size());
}

void ExcursionHarvester::feed(double w, double y) {
  if (finished_) throw invalid_argument("ExcursionHarvester: feed after finish");
  // Same reduction order as the materialized pipeline: update the running
  // minimum first, then subtract (zero exactly when y attains the minimum).
  if (first_sample_) {
    inf_ = y;
    first_sample_ = false;
  } else if (y < inf_) {
    inf_ = y;
  }
  const double xt = y - inf_;

  if (xt > 0.0) {
    ++kept_count_;
    if (!in_excursion_) {
      in_excursion_ = true;
      interior_count_ = 0;
      height_ = 0.0;
      for (RhoState& st : rho_state_) st = RhoState{};
    }
    height_ = std::max(height_, xt);
    last_interior_w_ = w;
    ++interior_count_;
    for (std::size_t i = 0; i < rho_state_.size(); ++i) {
      RhoState& st = rho_state_[i];
      if (!st.reached && xt >= opts_.rho_eps[i]) st.reached = true;
      if (st.reached && !st.captured && !(w > 0.0)) {
        st.captured = true;
        st.sample = xt;
      }
    }
  } else if (in_excursion_) {
    ++kept_count_;  // terminating boundary zero stays on the substituted clock
    close_excursion();
  }
  // zeros outside an excursion vanish under the time substitution
}

void ExcursionHarvester::close_excursion() {
  heights_.push_back(height_);
  lifetimes_.push_back(step_ * static_cast<double>(interior_count_ + 1));
  v_ends_.push_back(last_interior_w_);
  if (opts_.record_zero_times)
    zero_times_.push_back(step_ * static_cast<double>(kept_count_ - 1));
  for (std::size_t i = 0; i < rho_state_.size(); ++i) {
    const RhoState& st = rho_state_[i];
    if (!st.reached) continue;
    if (st.captured && st.sample > 0.0)
      rho_samples_[i].push_back(st.sample);
    else
      ++rho_anomalies_;  // velocity stayed positive until the boundary
  }
  in_excursion_ = false;
}

void ExcursionHarvester::finish() {
  finished_ = true;
  if (in_excursion_) {
    censored_count_ = 1;
    censored_duration_ = step_ * static_cast<double>(interior_count_);
    in_excursion_ = false;
  }
}

}  // namespace rlp
