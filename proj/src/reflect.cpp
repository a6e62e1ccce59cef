#include "rlp/reflect.hpp"

#include "rlp/errors.hpp"

namespace rlp {

std::vector<double> infimum_process(const std::vector<double>& y) {
    if (y.empty()) throw invalid_argument("empty path");
    std::vector<double> inf(y.size());
    inf[0] = y[0];
    for (std::size_t k = 1; k < y.size(); ++k)
        inf[k] = y[k] < inf[k - 1] ? y[k] : inf[k - 1];
    return inf;
}

TildePair tilde_process(const PathGrid& path) {
    if (path.y.size() != path.w.size() || path.y.empty())
        throw invalid_argument("malformed path grid");
    const std::vector<double> inf = infimum_process(path.y);
    TildePair t;
    t.x_tilde.resize(path.y.size());
    t.v_tilde.resize(path.y.size());
    for (std::size_t k = 0; k < path.y.size(); ++k) {
        t.x_tilde[k] = path.y[k] - inf[k];  // exact zero iff y[k] == inf[k]
        t.v_tilde[k] = t.x_tilde[k] > 0.0 ? path.w[k] : 0.0;
    }
    return t;
}

FlatScan flat_intervals(const std::vector<double>& x_tilde,
                        const std::vector<double>& w) {
    if (x_tilde.size() != w.size())
        throw invalid_argument("x_tilde and w length mismatch");
    FlatScan out;
    std::size_t k = 0;
    const std::size_t n = x_tilde.size();
    while (k < n) {
        if (x_tilde[k] != 0.0) {
            ++k;
            continue;
        }
        std::size_t e = k;
        while (e + 1 < n && x_tilde[e + 1] == 0.0) ++e;
        if (e > k) {
            out.flats.push_back({k, e});
            if (!(w[k] < 0.0)) ++out.left_velocity_violations;
        }
        k = e + 1;
    }
    return out;
}

std::vector<std::size_t> time_substitution(const std::vector<double>& x_tilde) {
    std::vector<std::size_t> kept;
    kept.reserve(x_tilde.size());
    bool in_run = false;
    for (std::size_t k = 0; k < x_tilde.size(); ++k) {
        if (x_tilde[k] > 0.0) {
            kept.push_back(k);
            in_run = true;
        } else if (in_run) {
            kept.push_back(k);  // boundary zero terminating the run
            in_run = false;
        }
    }
    return kept;
}

ReflectedPath reflected_process(const PathGrid& path) {
    const TildePair t = tilde_process(path);
    ReflectedPath rp;
    rp.step = path.step;
    rp.kept = time_substitution(t.x_tilde);
    rp.x.resize(rp.kept.size());
    rp.v.resize(rp.kept.size());
    for (std::size_t k = 0; k < rp.kept.size(); ++k) {
        rp.x[k] = t.x_tilde[rp.kept[k]];
        // v_tilde rather than raw w: the terminating zero of a run carries
        // velocity 0 on the substituted clock (the continuum substitution
        // lands on a velocity zero there; the raw grid sample does not).
        rp.v[k] = t.v_tilde[rp.kept[k]];
    }
    return rp;
}

}  // namespace rlp
