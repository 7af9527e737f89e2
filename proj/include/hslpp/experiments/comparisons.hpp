#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "../geodesic.hpp"
#include "../replicas.hpp"
#include "report.hpp"

namespace hslpp::experiments {

struct ComparisonConfig {
    FrameParams frame{.N = 200, .delta = 0.0, .kappa = 1.0};
    int pairs = 10;
    // Two alpha-beta environments: L = (ab_low, ab_high), L~ = (ab_high, ab_low).
    double ab_low = 0.1;
    double ab_high = 0.3;
};

// a <= b up to the rounding of two different summation orders.
inline bool leq_rounded(double a, double b) { return a <= b + 1e-10 * (1.0 + std::fabs(a) + std::fabs(b)); }

struct ComparisonTally {
    std::int64_t pairs = 0;
    std::int64_t v_pp_stat = 0;   // pp vs stationary rho+
    std::int64_t v_stat_stat = 0; // rho- vs rho+
    std::int64_t v_full_half = 0; // full space vs pp with diagonal rate 1
    std::int64_t v_alpha_beta = 0;
    std::int64_t crossed_a = 0;
    std::int64_t v_cross_a = 0;
    std::int64_t cond_b = 0;
    std::int64_t v_cross_b = 0;
};

inline bool crosses_in_bulk(const Geodesic& a, const Geodesic& b)
{
    for (const auto& x : intersection(a, b)) {
        if (in_bulk(x)) return true;
    }
    return false;
}

inline ComparisonTally comparison_replica(const ComparisonConfig& cfg, std::uint64_t seed)
{
    const ScalingFrame f(cfg.frame);
    const std::int64_t N = f.N();
    const double rho_plus = f.rho() + (f.rho() - f.rho_minus());
    auto spec = [&](ModelKind k) { return EnvironmentSpec{k, N, seed, 0}; };
    const LatticePoint o{0, 0}, top{N, N};
    auto table = [&](ModelKind k) { return build_table(Environment(spec(k)), o, top); };

    const auto pp = table(PointToPoint{f.alpha()});
    const auto st_plus = table(StationaryRho{rho_plus});
    const auto st_minus = table(StationaryRho{f.rho_minus()});
    const auto full = table(FullSpaceSquare{});
    const auto pp_one = table(PointToPointRate{1.0});
    const auto ab = table(AlphaBeta{cfg.ab_low, cfg.ab_high});
    const auto ab_tilde = table(AlphaBeta{cfg.ab_high, cfg.ab_low});

    CounterRng rng(seed ^ 0x6a09e667f3bcc909ULL);
    ComparisonTally t;
    for (int k = 0; k < cfg.pairs; ++k) {
        const std::int64_t i1 = rng.integer(2, N);
        const std::int64_t j1 = rng.integer(1, i1 - 1);
        const LatticePoint p{i1, j1};
        const LatticePoint q{rng.integer(i1, N), rng.integer(1, j1)};
        auto inc = [&](const PassageTable& tab) { return tab.value(q) - tab.value(p); };
        ++t.pairs;

        // Boundary-ordered pairs: no crossing condition needed.
        if (!leq_rounded(inc(pp), inc(st_plus))) ++t.v_pp_stat;
        if (!leq_rounded(inc(st_minus), inc(st_plus))) ++t.v_stat_stat;
        if (!leq_rounded(inc(full), inc(pp_one))) ++t.v_full_half;
        if (!leq_rounded(inc(ab), inc(ab_tilde))) ++t.v_alpha_beta;

        // Diagonal-ordered pairs under a bulk crossing. (a): L~ = pp has the
        // smaller diagonal weights; (b): L~ = rho- has the larger ones and its
        // geodesic to p must avoid the diagonal.
        if (crosses_in_bulk(backtrack(pp, p), backtrack(st_minus, q))) {
            ++t.crossed_a;
            if (!leq_rounded(inc(st_minus), inc(pp))) ++t.v_cross_a;
        }
        const auto pi_b = backtrack(st_minus, p);
        if (!touches_diagonal(pi_b) && crosses_in_bulk(pi_b, backtrack(pp, q))) {
            ++t.cond_b;
            if (!leq_rounded(inc(pp), inc(st_minus))) ++t.v_cross_b;
        }
    }
    return t;
}

inline Report check_comparisons(const ComparisonConfig& cfg, const RunOptions& run)
{
    const ScalingFrame f(cfg.frame);
    if (cfg.pairs < 1) throw domain_error("comparisons: pairs must be positive");
    if (!(cfg.frame.kappa > 0.0)) throw domain_error("comparisons: kappa must be positive");
    if (!(f.rho() + (f.rho() - f.rho_minus()) < 1.0)) throw domain_error("comparisons: rho+ must stay below 1");
    if (f.N() < 2) throw domain_error("comparisons: N must be at least 2");

    const auto tallies = run_replicas(run.replicas, run.seed0, run.threads,
                                      [&](std::int64_t, std::uint64_t s) { return comparison_replica(cfg, s); });
    ComparisonTally sum;
    for (const auto& t : tallies) {
        sum.pairs += t.pairs;
        sum.v_pp_stat += t.v_pp_stat;
        sum.v_stat_stat += t.v_stat_stat;
        sum.v_full_half += t.v_full_half;
        sum.v_alpha_beta += t.v_alpha_beta;
        sum.crossed_a += t.crossed_a;
        sum.v_cross_a += t.v_cross_a;
        sum.cond_b += t.cond_b;
        sum.v_cross_b += t.v_cross_b;
    }

    Report rep{"comparisons", cfg.frame, run, {}, {}};
    const auto n = sum.pairs;
    auto count = [&](const char* name, std::int64_t v, std::int64_t of) { rep.add(name, static_cast<double>(v), 0.0, of); };
    count("pairs", n, n);
    count("violations.pp_vs_stationary", sum.v_pp_stat, n);
    count("violations.stationary_vs_stationary", sum.v_stat_stat, n);
    count("violations.full_vs_half", sum.v_full_half, n);
    count("violations.alpha_beta", sum.v_alpha_beta, n);
    rep.add("frequency.crossing_a", fraction(sum.crossed_a, n), binomial_stderr(fraction(sum.crossed_a, n), n), n);
    count("violations.crossing_a", sum.v_cross_a, sum.crossed_a);
    rep.add("frequency.condition_b", fraction(sum.cond_b, n), binomial_stderr(fraction(sum.cond_b, n), n), n);
    count("violations.condition_b", sum.v_cross_b, sum.cond_b);

    rep.require(sum.v_pp_stat == 0, "pp increments exceed stationary rho+ increments");
    rep.require(sum.v_stat_stat == 0, "rho- increments exceed rho+ increments");
    rep.require(sum.v_full_half == 0, "full-space increments exceed half-space increments");
    rep.require(sum.v_alpha_beta == 0, "alpha-beta comparison violated");
    rep.require(sum.v_cross_a == 0, "crossing-conditional comparison (a) violated");
    rep.require(sum.v_cross_b == 0, "crossing-conditional comparison (b) violated");
    return rep;
}

} // namespace hslpp::experiments
