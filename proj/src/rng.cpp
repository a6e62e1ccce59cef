#include "rlp/rng.hpp"

#include <cmath>
#include <cstdlib>

namespace rlp {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Marsaglia-Tsang ziggurat tables for the standard normal, 128 layers,
// widened to 64-bit integer draws (magnitudes scaled by 2^63).
struct ZigTables {
    double wn[128];
    double fn[128];
    std::int64_t kn[128];

    ZigTables() {
        const double m1 = 9223372036854775808.0;  // 2^63
        double dn = 3.442619855899;
        double tn = dn;
        const double vn = 9.91256303526217e-3;

        double q = vn / std::exp(-0.5 * dn * dn);
        kn[0] = static_cast<std::int64_t>((dn / q) * m1);
        kn[1] = 0;
        wn[0] = q / m1;
        wn[127] = dn / m1;
        fn[0] = 1.0;
        fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; i--) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            kn[i + 1] = static_cast<std::int64_t>((dn / tn) * m1);
            tn = dn;
            fn[i] = std::exp(-0.5 * dn * dn);
            wn[i] = dn / m1;
        }
    }
};

const ZigTables zig;
const double kZigTail = 3.442619855899;

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t replica)
    : seed_(seed), replica_(replica) {
    // Mix (seed, replica) into one engine seed; splitmix decorrelates
    // neighbouring replica indices.
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (replica * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    std::uint64_t b = splitmix64(s);
    engine_.seed(b);
}

double RngStream::gaussian() {
    for (;;) {
        const std::uint64_t u = engine_();
        const std::int64_t hz = static_cast<std::int64_t>(u);
        const int iz = static_cast<int>(u & 127U);
        const std::int64_t az = hz < 0 ? -hz : hz;
        if (az < zig.kn[iz]) return static_cast<double>(hz) * zig.wn[iz];
        const double r = gaussian_slow_path(hz, iz);
        if (!std::isnan(r)) return r;
    }
}

double RngStream::gaussian_slow_path(std::int64_t hz, int iz) {
    if (iz == 0) {  // sample the tail beyond the last layer
        double x, y;
        do {
            x = -std::log(uniform()) / kZigTail;
            y = -std::log(uniform());
        } while (y + y < x * x);
        return hz > 0 ? kZigTail + x : -(kZigTail + x);
    }
    const double x = static_cast<double>(hz) * zig.wn[iz];
    if (zig.fn[iz] + uniform() * (zig.fn[iz - 1] - zig.fn[iz]) <
        std::exp(-0.5 * x * x)) {
        return x;
    }
    return std::nan("");  // wedge rejected: caller retries from the top
}

double RngStream::exponential() { return -std::log(uniform()); }

}  // namespace rlp
