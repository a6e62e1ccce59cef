#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rlp/reflect.hpp"
#include "rlp/rng.hpp"

namespace rlp {

// One maximal piece of the reflected path away from 0, sampled on the
// substituted clock.  x_samples/v_samples carry the boundary zeros at both
// ends, so zeta = step * (x_samples.size() - 1).
struct Excursion {
  double start_time = 0.0;  // reflected clock at the opening boundary sample
  double step = 0.0;
  std::vector<double> x_samples;
  std::vector<double> v_samples;
  double zeta = 0.0;          // lifetime on the reflected clock
  double height = 0.0;        // max of x_samples
  double v_end = 0.0;         // velocity at the last interior sample
  double d_first_zero = 0.0;  // time to the first non-positive velocity
};

struct TailSampleSet {
  std::string name;
  std::vector<double> values;
  std::size_t censored_count = 0;
};

// Jump times and sizes of the cumulative absorbed energy: one jump of
// v_end^2 / 2 at the end of each excursion.
struct EnergyLedger {
  std::vector<double> times;
  std::vector<double> jumps;
};

struct ExcursionSet {
  std::vector<Excursion> excursions;
  std::size_t censored_count = 0;   // trailing run cut by the horizon
  double censored_duration = 0.0;   // reflected time inside that run
  std::size_t discarded_count = 0;  // below min_height
};

// Decomposes the reflected path into completed excursions.  The trailing run
// still open at the horizon is excluded and counted (keeping it would bias
// lifetime tails downward).  min_height > 0 drops small excursions and
// counts them in discarded_count.
ExcursionSet extract_excursions(const ReflectedPath& rp,
                                double min_height = 0.0);

struct ExcursionTails {
  TailSampleSet heights;
  TailSampleSet lifetimes;
  TailSampleSet terminal_speeds;
};

// Pulls the three tail-law sample sets out of an excursion list.  Terminal
// speeds drop exact zeros (grid-degenerate excursions), since the tail
// statistics need strictly positive samples.
ExcursionTails excursion_tails(const std::vector<Excursion>& excs);

// Recomputes the time to the first non-positive velocity sample, counted
// from the first interior sample; the closing boundary zero counts as a
// velocity zero.  Equals the recorded d_first_zero.
double first_zero_of_velocity(const Excursion& exc);

struct RhoPassage {
  double rho = 0.0;       // sample time from the opening boundary sample
  double e_at_rho = 0.0;  // position at that sample
};

// First sample at which the velocity is non-positive after the excursion has
// reached level eps.  Empty when the excursion never reaches eps.  The
// passage time is non-decreasing in eps by construction of the scan.
std::optional<RhoPassage> rho_passage(const Excursion& exc, double eps);

// Requires time order (non-decreasing end times).
EnergyLedger energy_process(const std::vector<Excursion>& excs);

struct EntrancePoint {
  double x = 0.0;
  double probability = 0.0;
};

// Monte Carlo estimate, for each start height x, of the probability that the
// particle started at (x, 0) reaches `threshold` before falling to 0.
// Points with x >= threshold return probability 1 without simulating.  Runs
// that resolve neither way within max_steps count as failures (only the
// noise-disabled degenerate start can linger that long).
std::vector<EntrancePoint> entrance_scaling_probe(
    const std::vector<double>& xs, double threshold, std::size_t replicas,
    double step, RngStream& rng, bool with_noise = true,
    std::size_t max_steps = 1'000'000);

// ---------------------------------------------------------------------------
// Streaming harvest for long ensembles
// ---------------------------------------------------------------------------

// Consumes the raw chain sample by sample and accumulates the per-excursion
// statistics in O(1) memory per step, replicating the materialized
// reflect + extract pipeline bit-for-bit (same reduction order).  Used for
// runs too long to hold in memory.
class ExcursionHarvester {
 public:
  struct Options {
    std::vector<double> rho_eps;    // levels for passage-sample harvesting
    bool record_zero_times = false; // reflected-clock zero-set times
  };

  explicit ExcursionHarvester(double step) : ExcursionHarvester(step, Options()) {}
  ExcursionHarvester(double step, Options opts);

  // Feed one raw grid sample (velocity, position), in time order, starting
  // with the initial condition.
  void feed(double w, double y);
  // Mark the horizon: a still-open trailing run becomes the censored tail.
  void finish();

  const std::vector<double>& heights() const { return heights_; }
  const std::vector<double>& lifetimes() const { return lifetimes_; }
  const std::vector<double>& v_ends() const { return v_ends_; }
  const std::vector<double>& zero_times() const { return zero_times_; }
  // Passage samples for opts.rho_eps[i].
  const std::vector<double>& rho_samples(std::size_t i) const {
    return rho_samples_[i];
  }
  std::size_t n_excursions() const { return heights_.size(); }
  std::size_t censored_count() const { return censored_count_; }
  double censored_duration() const { return censored_duration_; }
  // Excursions that reached a rho level but produced a degenerate (zero)
  // passage sample; excluded from rho_samples.
  std::size_t rho_anomalies() const { return rho_anomalies_; }
  double reflected_duration() const {
    return static_cast<double>(kept_count_) * step_;
  }

 private:
  void close_excursion();

  double step_;
  Options opts_;

  // reflection state
  bool first_sample_ = true;
  double inf_ = 0.0;

  // substitution / excursion state
  std::size_t kept_count_ = 0;
  bool in_excursion_ = false;
  std::size_t interior_count_ = 0;
  double height_ = 0.0;
  double last_interior_w_ = 0.0;

  // per-eps passage scan state
  struct RhoState {
    bool reached = false;
    bool captured = false;
    double sample = 0.0;
  };
  std::vector<RhoState> rho_state_;

  // harvested
  std::vector<double> heights_;
  std::vector<double> lifetimes_;
  std::vector<double> v_ends_;
  std::vector<double> zero_times_;
  std::vector<std::vector<double>> rho_samples_;
  std::size_t censored_count_ = 0;
  double censored_duration_ = 0.0;
  std::size_t rho_anomalies_ = 0;
  bool finished_ = false;
};

}  // namespace rlp
