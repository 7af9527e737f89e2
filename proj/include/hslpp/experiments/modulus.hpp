#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "../passage.hpp"
#include "../replicas.hpp"
#include "report.hpp"

namespace hslpp::experiments {

struct ModulusConfig {
    FrameParams frame{.N = 500};
    double u_max = 1.0; // u ranges over [0, u_max]
    std::vector<double> delta_grid{0.5, 0.25, 0.125};
    std::vector<double> eps_grid{1.0};
};

// Largest max - min over windows of `width` consecutive steps.
inline double window_oscillation(const std::vector<double>& v, std::int64_t width)
{
    if (v.empty()) return 0.0;
    const auto n = static_cast<std::int64_t>(v.size());
    width = std::clamp<std::int64_t>(width, 0, n - 1);
    std::deque<std::int64_t> hi, lo;
    double best = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        while (!hi.empty() && v[hi.back()] <= v[k]) hi.pop_back();
        while (!lo.empty() && v[lo.back()] >= v[k]) lo.pop_back();
        hi.push_back(k);
        lo.push_back(k);
        while (hi.front() < k - width) hi.pop_front();
        while (lo.front() < k - width) lo.pop_front();
        best = std::max(best, v[hi.front()] - v[lo.front()]);
    }
    return best;
}

// omega_N(delta) for the rescaled pp profile u -> L_N(u), u in [0, u_max].
inline std::vector<double> modulus_replica(const ModulusConfig& cfg, const ScalingFrame& f, std::uint64_t seed)
{
    const std::int64_t steps = f.offset_steps(cfg.u_max);
    std::vector<LatticePoint> ends;
    for (std::int64_t m = 0; m <= steps; ++m) ends.push_back({f.N() + m, f.N() - m});
    const auto raw = last_passage_many(Environment(EnvironmentSpec{PointToPoint{f.alpha()}, f.N(), seed, 0}),
                                       LatticePoint{0, 0}, ends);
    std::vector<double> prof(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) prof[k] = f.rescale_pp(raw[k], 1.0);
    std::vector<double> out;
    for (double d : cfg.delta_grid) out.push_back(window_oscillation(prof, f.offset_steps(d)));
    return out;
}

inline Report modulus_of_continuity(const ModulusConfig& cfg, const RunOptions& run)
{
    const ScalingFrame f(cfg.frame);
    if (!(cfg.u_max > 0.0) || f.offset_steps(cfg.u_max) >= f.N()) throw domain_error("modulus: u range leaves the half-space");
    for (double d : cfg.delta_grid) {
        if (!(d > 0.0)) throw domain_error("modulus: delta values must be positive");
    }
    const auto xs = run_replicas(run.replicas, run.seed0, run.threads,
                                 [&](std::int64_t, std::uint64_t s) { return modulus_replica(cfg, f, s); });
    Report rep{"modulus", cfg.frame, run, {}, {}};
    const std::int64_t n = run.replicas;
    for (double eps : cfg.eps_grid) {
        std::vector<double> probs;
        for (std::size_t k = 0; k < cfg.delta_grid.size(); ++k) {
            std::int64_t hits = 0;
            for (const auto& x : xs) hits += x[k] >= eps;
            probs.push_back(fraction(hits, n));
            rep.add("p_omega_ge_eps[delta=" + format_real(cfg.delta_grid[k]) + ",eps=" + format_real(eps) + "]",
                    probs.back(), binomial_stderr(probs.back(), n));
        }
        // Diagnostic: the probability should not grow as delta shrinks.
        bool monotone = true;
        for (std::size_t a = 0; a < probs.size(); ++a) {
            for (std::size_t b = 0; b < probs.size(); ++b) {
                if (cfg.delta_grid[b] < cfg.delta_grid[a] && probs[b] > probs[a]) monotone = false;
            }
        }
        rep.add("non_increasing[eps=" + format_real(eps) + "]", monotone ? 1.0 : 0.0);
    }
    return rep;
}

} // namespace hslpp::experiments
