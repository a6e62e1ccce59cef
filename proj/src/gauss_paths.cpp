#include "rlp/gauss_paths.hpp"

#include <cmath>
#include <limits>

#include "rlp/errors.hpp"

namespace rlp {
namespace {

void check_grid_args(std::size_t n_steps, double step, double horizon_cap) {
    if (n_steps == 0) throw invalid_argument("n_steps must be positive");
    if (!(step > 0.0) || !std::isfinite(step))
        throw invalid_argument("step must be positive and finite");
    if (static_cast<double>(n_steps) * step > horizon_cap)
        throw resource_limit("n_steps * step exceeds the horizon cap");
}

// Wiener values on the dyadic hierarchy.  n_steps factors as odd * 2^L; the
// odd-length walk is drawn sequentially, then L midpoint-insertion passes
// refine it.  Coarse grid values are copied verbatim on every pass, so a
// rerun with the same seed and n_steps doubled reproduces them bit-for-bit.
std::vector<double> wiener_bridge(std::size_t n_steps, double step,
                                  RngStream& rng, bool with_noise) {
    std::size_t odd = n_steps;
    int levels = 0;
    while ((odd & 1U) == 0U) {
        odd >>= 1U;
        ++levels;
    }
    const double coarse = step * static_cast<double>(std::size_t{1} << levels);

    std::vector<double> cur(odd + 1);
    cur[0] = 0.0;
    const double sc = std::sqrt(coarse);
    for (std::size_t j = 1; j <= odd; ++j)
        cur[j] = cur[j - 1] + (with_noise ? sc * rng.gaussian() : 0.0);

    double spacing = coarse;
    for (int lev = 0; lev < levels; ++lev) {
        const std::size_t m = cur.size() - 1;
        std::vector<double> fine(2 * m + 1);
        const double half_sd = 0.5 * std::sqrt(spacing);
        for (std::size_t j = 0; j < m; ++j) {
            fine[2 * j] = cur[j];
            fine[2 * j + 1] = 0.5 * (cur[j] + cur[j + 1]) +
                              (with_noise ? half_sd * rng.gaussian() : 0.0);
        }
        fine[2 * m] = cur[m];
        cur.swap(fine);
        spacing *= 0.5;
    }
    return cur;
}

}  // namespace

PathGrid simulate_kolmogorov(std::size_t n_steps, double step, double x0,
                             double v0, RngStream& rng, GenMode mode,
                             bool with_noise, double horizon_cap) {
    check_grid_args(n_steps, step, horizon_cap);

    PathGrid p;
    p.step = step;
    if (mode == GenMode::bridge) {
        p.w = wiener_bridge(n_steps, step, rng, with_noise);
        for (double& v : p.w) v += v0;
        p.y.resize(n_steps + 1);
        p.y[0] = x0;
        for (std::size_t k = 0; k < n_steps; ++k)
            p.y[k + 1] = p.y[k] + 0.5 * (p.w[k] + p.w[k + 1]) * step;
    } else {
        p.w.resize(n_steps + 1);
        p.y.resize(n_steps + 1);
        p.w[0] = v0;
        p.y[0] = x0;
        const double sw = std::sqrt(step);
        const double sf = std::sqrt(step * step * step / 12.0);
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double dw = with_noise ? sw * rng.gaussian() : 0.0;
            const double fluct = with_noise ? sf * rng.gaussian() : 0.0;
            p.y[k + 1] = p.y[k] + p.w[k] * step + 0.5 * step * dw + fluct;
            p.w[k + 1] = p.w[k] + dw;
        }
    }
    return p;
}

StoppedPath simulate_stopped_langevin(double x, double v0, double step,
                                      RngStream& rng, double horizon_cap,
                                      bool with_noise) {
    if (!(x > 0.0)) throw invalid_argument("start position must be positive");
    if (!(step > 0.0) || !std::isfinite(step))
        throw invalid_argument("step must be positive and finite");
    if (!(horizon_cap > 0.0))
        throw invalid_argument("horizon cap must be positive");

    StoppedPath out;
    out.path.step = step;
    out.path.w.push_back(v0);
    out.path.y.push_back(x);

    const double sw = std::sqrt(step);
    const double sf = std::sqrt(step * step * step / 12.0);
    const auto max_steps =
        static_cast<std::size_t>(std::floor(horizon_cap / step));
    double w = v0, y = x;
    for (std::size_t k = 0; k < max_steps; ++k) {
        const double dw = with_noise ? sw * rng.gaussian() : 0.0;
        const double fluct = with_noise ? sf * rng.gaussian() : 0.0;
        const double yn = y + w * step + 0.5 * step * dw + fluct;
        const double wn = w + dw;
        out.path.w.push_back(wn);
        out.path.y.push_back(yn);
        if (yn <= 0.0) {
            const double frac = y == yn ? 0.0 : y / (y - yn);
            out.lifetime = static_cast<double>(k) * step + frac * step;
            return out;
        }
        w = wn;
        y = yn;
    }
    out.censored = true;
    out.lifetime = static_cast<double>(max_steps) * step;
    return out;
}

PathGrid bounce_path(const PathGrid& path) {
    PathGrid b;
    b.step = path.step;
    b.w.resize(path.w.size());
    b.y.resize(path.y.size());
    for (std::size_t k = 0; k < path.y.size(); ++k) {
        b.y[k] = std::fabs(path.y[k]);
        b.w[k] = path.y[k] < 0.0 ? -path.w[k] : path.w[k];
    }
    return b;
}

LifetimeSample stopped_lifetime(double x, double v0, double step,
                                RngStream& rng, double horizon_cap) {
    if (!(x > 0.0)) throw invalid_argument("start position must be positive");
    const double sw = std::sqrt(step);
    const double sf = std::sqrt(step * step * step / 12.0);
    const auto max_steps =
        static_cast<std::size_t>(std::floor(horizon_cap / step));
    double w = v0, y = x;
    for (std::size_t k = 0; k < max_steps; ++k) {
        const double dw = sw * rng.gaussian();
        const double yn = y + w * step + 0.5 * step * dw + sf * rng.gaussian();
        if (yn <= 0.0) {
            const double frac = y == yn ? 0.0 : y / (y - yn);
            return {static_cast<double>(k) * step + frac * step, false};
        }
        w += dw;
        y = yn;
    }
    return {static_cast<double>(max_steps) * step, true};
}

// Cube root that commutes exactly with scaling by powers of 8: y is split as
// m * 8^q with m in [0.5, 4), so the exponent part never touches the
// mantissa.  std::cbrt alone makes no last-ulp guarantee, and a stray ulp in
// the restart map would break the bit-for-bit rescaling coupling the
// cross-scale comparisons rely on.
static double cbrt_pow8_invariant(double y) {
    int e = 0;
    const double m = std::frexp(y, &e);
    int q = e / 3, r = e % 3;
    if (r < 0) {
        r += 3;
        --q;
    }
    return std::cbrt(std::ldexp(m, r)) * std::ldexp(1.0, q);
}

LifetimeSample stopped_lifetime_rescaled(double x, double v0, double step,
                                         RngStream& rng, double block_time,
                                         int max_blocks, double rep_step) {
    if (!(x > 0.0)) throw invalid_argument("start position must be positive");
    if (!(block_time > step))
        throw invalid_argument("block_time must exceed the step");
    if (rep_step < 0.0) throw invalid_argument("rep_step must be >= 0");

    double h = step;
    double sw = std::sqrt(h);
    double sf = std::sqrt(h * h * h / 12.0);
    const auto block_steps =
        static_cast<std::size_t>(std::floor(block_time / step));

    double total = 0.0;
    double scale = 1.0;
    double w = v0, y = x;
    for (int blk = 0; blk < max_blocks; ++blk) {
        for (std::size_t k = 0; k < block_steps; ++k) {
            const double dw = sw * rng.gaussian();
            const double yn = y + w * h + 0.5 * h * dw + sf * rng.gaussian();
            if (yn <= 0.0) {
                const double frac = y == yn ? 0.0 : y / (y - yn);
                const double t = static_cast<double>(k) * h + frac * h;
                return {total + scale * t, false};
            }
            w += dw;
            y = yn;
        }
        total += scale * static_cast<double>(block_steps) * h;
        // Restart from position 1: zeta(x, v) = a * zeta(1, v * x^{-1/3})
        // in law with a = x^{2/3}.
        const double c = cbrt_pow8_invariant(y);
        scale *= c * c;
        w /= c;
        y = 1.0;
        if (rep_step > 0.0 && h != rep_step) {
            h = rep_step;
            sw = std::sqrt(h);
            sf = std::sqrt(h * h * h / 12.0);
        }
        if (!std::isfinite(scale) || scale > 1e280)
            return {total, true};  // astronomically deep tail; give up honestly
    }
    return {total, true};
}

}  // namespace rlp
