#pragma once

#include <cstdint>
#include <random>

namespace rlp {

// Deterministic random stream keyed by (seed, replica).
//
// Every ensemble worker owns the stream for its replica index, so results do
// not depend on scheduling or worker count: replica r always sees the same
// draw sequence.  Gaussians come from a 128-layer ziggurat over a
// mt19937_64 engine (the ensembles consume ~1e10 gaussians, so the usual
// Box-Muller transcendentals would dominate the run time).
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t replica = 0);

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0,1); never returns an endpoint.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal draw.
    double gaussian();

    // Standard exponential draw.
    double exponential();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t replica() const { return replica_; }

  private:
    double gaussian_slow_path(std::int64_t hz, int iz);

    std::uint64_t seed_;
    std::uint64_t replica_;
    std::mt19937_64 engine_;
};

}  // namespace rlp
