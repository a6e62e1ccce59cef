#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlp/estimators.hpp"
#include "rlp/excursions.hpp"
#include "rlp/manifest.hpp"
#include "rlp/stable.hpp"

namespace rlp::cli {

inline constexpr const char* kLibraryVersion = "1.0.0";

struct RunOutcome {
  int status = 0;  // 0 ok, 2 statistical decision failed
  std::vector<std::string> files;
};

// Executes one experiment end to end: runs the simulation, writes the CSV
// artifacts and a JSON report (<out>.report.json) echoing the full manifest.
// Hard errors propagate as exceptions; the CLI maps them to exit status 1.
RunOutcome run_experiment(const ExperimentManifest& m);

// ---------------------------------------------------------------------------
// Ensemble building blocks shared between the CLI and the acceptance harness
// ---------------------------------------------------------------------------

struct EnsembleSpec {
  std::size_t steps = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::size_t replicas = 1;
  std::size_t first_replica = 0;  // replica index offset (disjoint streams)
  std::vector<double> rho_eps;
  bool record_zero_times = false;
};

// Pooled streaming harvest over independent replicas, each a fresh chain
// from the origin decomposed on the fly.  Results are concatenated in
// replica order, so they do not depend on scheduling.
struct EnsembleHarvest {
  std::vector<double> heights;
  std::vector<double> lifetimes;
  std::vector<double> v_ends;
  std::vector<std::vector<double>> rho_samples;  // parallel to spec.rho_eps
  std::vector<std::vector<double>> zero_times;   // one list per replica
  std::vector<std::size_t> excursions_per_replica;
  std::size_t censored_runs = 0;
  double censored_duration = 0.0;
  double reflected_duration = 0.0;
  std::size_t rho_anomalies = 0;
};

EnsembleHarvest pooled_excursion_harvest(const EnsembleSpec& spec);

// One draw per replica of the reflected position at substituted grid index
// kept_index (reflected time = kept_index * dt), streamed without retaining
// the path.
//
// Raw time spent pinned to the running minimum between two kept samples has
// a one-sided stable(1/2) tail, so its mean is infinite and no fixed overall
// budget can hold.  Instead each dropped stretch gets its own step budget;
// exceeding it abandons the replica, which is redrawn from a fresh stream.
// The redraw event depends only on the kept/dropped pattern, which the
// dt -> a*dt self-similarity maps exactly, so two groups sampled with the
// same slide_budget stay identically conditioned and remain comparable.
struct MarginalSample {
  std::vector<double> values;
  std::size_t redraws = 0;  // abandoned attempts, summed over replicas
};

MarginalSample reflected_marginal(std::size_t kept_index, double dt,
                                  std::uint64_t seed,
                                  std::size_t first_replica,
                                  std::size_t replicas,
                                  std::uint64_t slide_budget = 1'000'000);

// Independent two-sided exit experiments, one stream per replica.  workers
// may run replicas concurrently; results always land in replica order.
std::vector<ExitRecord> exit_ensemble(double x, double eps, double dt,
                                      std::uint64_t step_cap,
                                      std::uint64_t seed, std::size_t replicas,
                                      unsigned workers = 1);

// Chi-square comparison of the above-exit landing positions against the
// analytic density, restricted to (eps, window_mult * eps] and renormalized
// to that window's mass.
struct ExitGofSummary {
  GofResult gof;
  double p_above = 0.0;
  double se_above = 0.0;
  std::size_t n_above = 0;
  std::size_t n_windowed = 0;
  std::size_t n_censored = 0;
};

ExitGofSummary exit_position_gof(const std::vector<ExitRecord>& records,
                                 double x, double eps, std::size_t bins,
                                 double window_mult);

// Deterministic shortest-round-trip float formatting used by every CSV
// writer (%.17g): reruns of the same manifest must be byte-identical.
std::string format_g17(double v);

}  // namespace rlp::cli
