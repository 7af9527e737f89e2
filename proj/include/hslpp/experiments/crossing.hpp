#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "../geodesic.hpp"
#include "../replicas.hpp"
#include "comparisons.hpp"
#include "report.hpp"

namespace hslpp::experiments {

struct CrossingConfig {
    std::int64_t N = 500;
    double delta = 0.0;
    std::vector<double> gaps{1.0, 2.0, 3.0, 4.0}; // kappa - delta
    double u1 = 0.25;
    double u2 = 0.5;
    double min_probability = 0.99; // required at the largest gap
};

struct CrossingSample {
    bool crossed = false;
    bool touched = false;
    bool increment_ok = true;
};

inline CrossingSample crossing_replica(const ScalingFrame& f, const LatticePoint& p, const LatticePoint& q,
                                       std::uint64_t seed)
{
    const EnvironmentSpec st{StationaryRho{f.rho_minus()}, f.N(), seed, 0};
    const EnvironmentSpec pp{PointToPoint{f.alpha()}, f.N(), seed, 0};
    const LatticePoint o{0, 0}, box{q.i, p.j};
    const auto tab_st = build_table(Environment(st), o, box);
    const auto tab_pp = build_table(Environment(pp), o, box);
    const auto rep = crossing_report(backtrack(tab_st, q), backtrack(tab_pp, p));
    CrossingSample s{rep.crossed, rep.touched_diagonal, true};
    if (rep.crossed) {
        const double d_st = tab_st.value(q) - tab_st.value(p);
        const double d_pp = tab_pp.value(q) - tab_pp.value(p);
        s.increment_ok = leq_rounded(d_st, d_pp);
    }
    return s;
}

// P(Omega_cross) per gap, with the touch => cross implication and the
// increment inequality on the crossing event checked on every replica.
inline Report crossing_sweep(const CrossingConfig& cfg, const RunOptions& run)
{
    if (cfg.gaps.empty()) throw domain_error("crossing: empty gap list");
    if (!(cfg.u1 < cfg.u2)) throw domain_error("crossing: requires u1 < u2");
    Report rep{"crossing", FrameParams{.N = cfg.N, .delta = cfg.delta}, run, {}, {}};
    std::vector<double> probs;
    for (double g : cfg.gaps) {
        if (!(g > 0.0)) throw domain_error("crossing: gaps must be positive");
        const ScalingFrame f(FrameParams{.N = cfg.N, .delta = cfg.delta, .kappa = cfg.delta + g});
        const LatticePoint p = f.q_point(cfg.u1, 1.0), q = f.q_point(cfg.u2, 1.0);
        if (!in_bulk(p) || !in_bulk(q)) throw domain_error("crossing: endpoints must lie in the bulk");
        const auto xs = run_replicas(run.replicas, run.seed0, run.threads,
                                     [&](std::int64_t, std::uint64_t s) { return crossing_replica(f, p, q, s); });
        std::int64_t crossed = 0, touched = 0, bad_touch = 0, bad_inc = 0;
        for (const auto& x : xs) {
            crossed += x.crossed;
            touched += x.touched;
            bad_touch += x.touched && !x.crossed;
            bad_inc += !x.increment_ok;
        }
        const std::string at = "[gap=" + format_real(g) + "]";
        const double pc = fraction(crossed, run.replicas);
        probs.push_back(pc);
        rep.add("p_cross" + at, pc, binomial_stderr(pc, run.replicas));
        rep.add("p_touch" + at, fraction(touched, run.replicas), binomial_stderr(fraction(touched, run.replicas), run.replicas));
        rep.add("touch_without_cross" + at, static_cast<double>(bad_touch));
        rep.add("violations.increment" + at, static_cast<double>(bad_inc), 0.0, crossed);
        rep.require(bad_touch == 0, "diagonal touch without crossing at gap " + format_real(g));
        rep.require(bad_inc == 0, "increment inequality violated on the crossing event at gap " + format_real(g));
    }
    bool monotone = true;
    for (std::size_t k = 1; k < probs.size(); ++k) monotone = monotone && probs[k] >= probs[k - 1];
    rep.add("monotone", monotone ? 1.0 : 0.0);
    rep.add("min_probability", cfg.min_probability);
    rep.require(monotone, "crossing probability not monotone in the gap");
    rep.require(probs.back() >= cfg.min_probability, "crossing probability below threshold at the largest gap");
    return rep;
}

} // namespace hslpp::experiments
