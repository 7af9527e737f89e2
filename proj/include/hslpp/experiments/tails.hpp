#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "../passage.hpp"
#include "../replicas.hpp"
#include "report.hpp"

namespace hslpp::experiments {

// ---- random walks -------------------------------------------------------

struct RandomWalkConfig {
    std::int64_t N = 1000;
    double L = 1.0;
    double kappa = 0.0; // walk density rho = 1/2 + kappa 2^{-4/3} N^{-1/3}
    std::vector<double> xi{1.0, 1.5, 2.0};
    // Sums of the coupling increments P + Q between rho and rho - a3_kappa.
    double a3_u = 1.0;
    double a3_kappa = 1.0;
    std::vector<double> a3_s{0.5, 1.0, 1.5, 2.0};
    double a3_constant = 2.0;
};

struct WalkSample {
    double end = 0.0; // W_N(L)
    double sup = 0.0; // sup over u <= L of W_N(u)
};

// W_N(u) = (sum_{k <= u (2N)^{2/3}} Z_k - 4 2^{1/3} u kappa N^{1/3}) / (2^{4/3} N^{1/3}),
// Z = Exp(1 - rho) - Exp(rho).
inline WalkSample random_walk_replica(const RandomWalkConfig& cfg, std::uint64_t seed)
{
    const double n = static_cast<double>(cfg.N);
    const double scale = std::cbrt(4.0 * n * n), sigma = std::cbrt(16.0 * n);
    const double rho = 0.5 + cfg.kappa / sigma;
    const double drift = 4.0 * std::cbrt(2.0) * cfg.kappa * std::cbrt(n);
    const auto steps = static_cast<std::int64_t>(std::floor(cfg.L * scale));
    CounterRng rng(seed);
    WalkSample w;
    double s = 0.0;
    for (std::int64_t k = 1; k <= steps; ++k) {
        s += rng.exponential(1.0 - rho) - rng.exponential(rho);
        w.sup = std::max(w.sup, (s - drift * static_cast<double>(k) / scale) / sigma);
    }
    w.end = (s - drift * cfg.L) / sigma;
    return w;
}

// (2^{4/3} N^{1/3})^{-1} sum_{i <= u (2N)^{2/3}} (P_i + Q_i).
inline double increment_sum_replica(const RandomWalkConfig& cfg, std::uint64_t seed)
{
    const double n = static_cast<double>(cfg.N);
    const double scale = std::cbrt(4.0 * n * n), sigma = std::cbrt(16.0 * n);
    const double rho = 0.5 + cfg.kappa / sigma, rho_minus = rho - cfg.a3_kappa / sigma;
    const double rp = increment_p_rate(rho, rho_minus), rq = increment_q_rate(rho, rho_minus);
    const auto terms = static_cast<std::int64_t>(std::floor(cfg.a3_u * scale));
    CounterRng rng(seed ^ 0xa3a3a3a3ULL);
    double s = 0.0;
    for (std::int64_t k = 0; k < terms; ++k) s += rng.exponential(rp) + rng.exponential(rq);
    return s / sigma;
}

inline void check_resolvable(const BoundCheck& b, Report& rep, const std::string& what)
{
    for (std::size_t k = 0; k < b.abscissae.size(); ++k) {
        if (b.censored[k]) rep.failures.push_back(what + ": grid point " + format_real(b.abscissae[k]) + " is censored");
    }
}

inline void add_random_walk_checks(Report& rep, const RandomWalkConfig& cfg, const RunOptions& run)
{
    if (!(cfg.L > 0.0)) throw domain_error("rw-bounds: L must be positive");
    const auto ws = run_replicas(run.replicas, run.seed0, run.threads,
                                 [&](std::int64_t, std::uint64_t s) { return random_walk_replica(cfg, s); });
    const std::int64_t n = run.replicas;
    BoundCheck lower, upper, sup;
    for (double xi : cfg.xi) {
        std::int64_t lo = 0, hi = 0, sp = 0;
        for (const auto& w : ws) {
            lo += w.end <= -xi;
            hi += w.end >= xi;
            sp += w.sup >= xi;
        }
        const double b = std::exp(-xi * xi / (4.0 * cfg.L));
        lower.add(xi, fraction(lo, n), 2.0 * b, n);
        upper.add(xi, fraction(hi, n), 2.0 * b, n);
        sup.add(xi, fraction(sp, n), b, n);
    }
    add_bound_rows(rep, "walk.lower", lower);
    add_bound_rows(rep, "walk.upper", upper);
    add_bound_rows(rep, "walk.sup", sup);
    rep.require(lower.satisfied, "P(W <= -xi) exceeds 2 exp(-xi^2 / 4L)");
    rep.require(upper.satisfied, "P(W >= xi) exceeds 2 exp(-xi^2 / 4L)");
    rep.require(sup.satisfied, "P(sup W >= xi) exceeds exp(-xi^2 / 4L)");
    check_resolvable(lower, rep, "walk.lower");
    check_resolvable(sup, rep, "walk.sup");

    if (!(cfg.a3_kappa > 0.0 && cfg.a3_u > 0.0)) throw domain_error("rw-bounds: increment sums need u, kappa > 0");
    const auto ts = run_replicas(run.replicas, hash_combine(run.seed0, 0xa3), run.threads,
                                 [&](std::int64_t, std::uint64_t s) { return increment_sum_replica(cfg, s); });
    const double n13 = std::cbrt(static_cast<double>(cfg.N));
    BoundCheck a3;
    for (double s : cfg.a3_s) {
        const double level = 2.0 * cfg.a3_u * cfg.a3_kappa + s / n13;
        std::int64_t hits = 0;
        for (double t : ts) hits += t >= level;
        const double b = cfg.a3_constant *
                         std::exp(-s * s / (std::cbrt(16.0) * cfg.a3_u * cfg.a3_kappa * cfg.a3_kappa));
        a3.add(s, fraction(hits, n), b, n);
    }
    add_bound_rows(rep, "increment_sum.upper", a3);
    rep.require(a3.satisfied, "increment-sum tail exceeds C exp(-s^2 / (2^{4/3} u kappa^2))");
    check_resolvable(a3, rep, "increment_sum.upper");
}

inline Report rw_bounds_experiment(const RandomWalkConfig& cfg, const RunOptions& run)
{
    Report rep{"rw-bounds", FrameParams{.N = cfg.N, .kappa = cfg.kappa}, run, {}, {}};
    add_random_walk_checks(rep, cfg, run);
    return rep;
}

// ---- last-passage tails -------------------------------------------------

struct LppTailConfig {
    std::int64_t N = 300;
    double u = 0.0;
    std::vector<double> upper_s{0.5, 1.0, 1.5, 2.0};
    std::vector<double> lower_s{1.0, 1.5, 2.0, 2.5};
};

struct Fitted {
    LinearFit fit;
    bool ok = false;
};

// Least squares of ln P on g(S) over resolvable points.
inline Fitted fit_log_tail(const std::vector<double>& s, const std::vector<double>& p, std::int64_t n, double power)
{
    std::vector<double> x, y;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (p[k] < censor_level(n)) continue;
        x.push_back(std::pow(s[k], power));
        y.push_back(std::log(p[k]));
    }
    Fitted f;
    if (x.size() < 2) return f;
    f.fit = least_squares(x, y);
    f.ok = true;
    return f;
}

inline void add_lpp_tail_checks(Report& rep, const LppTailConfig& cfg, const RunOptions& run)
{
    const ScalingFrame f(FrameParams{.N = cfg.N});
    const LatticePoint q = f.q_point(cfg.u, 1.0);
    const auto xs = run_replicas(run.replicas, run.seed0, run.threads, [&](std::int64_t, std::uint64_t s) {
        std::array<double, 2> out{};
        const ModelKind kinds[2] = {PointToPoint{0.0}, StationaryRho{0.5}};
        for (int k = 0; k < 2; ++k) {
            out[k] = f.rescale_pp(last_passage(Environment(EnvironmentSpec{kinds[k], cfg.N, s, 0}), LatticePoint{0, 0}, q), 1.0);
        }
        return out;
    });
    const std::int64_t n = run.replicas;
    const char* names[2] = {"pp", "stationary"};
    for (int k = 0; k < 2; ++k) {
        // Centre each model at its own sample median so that S measures the
        // distance into the tail.
        std::vector<double> v;
        for (const auto& x : xs) v.push_back(x[k]);
        std::sort(v.begin(), v.end());
        const double med = v[v.size() / 2];
        std::vector<double> pu, pl;
        for (double s : cfg.upper_s) {
            pu.push_back(fraction(v.end() - std::lower_bound(v.begin(), v.end(), med + s), n));
            rep.add(std::string("lpp.upper.") + names[k] + "[S=" + format_real(s) + "]", pu.back(), binomial_stderr(pu.back(), n));
        }
        for (double s : cfg.lower_s) {
            pl.push_back(fraction(std::upper_bound(v.begin(), v.end(), med - s) - v.begin(), n));
            rep.add(std::string("lpp.lower.") + names[k] + "[S=" + format_real(s) + "]", pl.back(), binomial_stderr(pl.back(), n));
        }
        const auto up = fit_log_tail(cfg.upper_s, pu, n, 1.0);
        const auto lo = fit_log_tail(cfg.lower_s, pl, n, 1.5);
        rep.add(std::string("lpp.upper.decay_rate.") + names[k], up.ok ? -up.fit.slope : std::nan(""));
        rep.add(std::string("lpp.lower.decay_rate.") + names[k], lo.ok ? -lo.fit.slope : std::nan(""));
        rep.require(up.ok && up.fit.slope < 0.0, std::string(names[k]) + ": upper tail has no positive decay rate");
        rep.require(lo.ok && lo.fit.slope < 0.0, std::string(names[k]) + ": lower tail has no positive decay rate");
    }
}

// ---- diagonal end-point lower tail ---------------------------------------

struct RhpConfig {
    std::int64_t N = 400;
    std::vector<double> w{-1.0, -1.5, -2.0};
    std::vector<double> mu{1.0, 2.0, 3.0};
    double anchor_w = -1.0;
    double anchor_mu = 1.0;
};

inline double rhp_shape(double w, double mu)
{
    return std::exp(w * w * w * (8.0 / 3.0 - 2.0 * mu + 2.0 / 3.0 * std::pow(mu, 1.5)));
}

// P(L_N <= 4N + mu w^2 2^{4/3} N^{1/3}) to (N, N), bulk and bottom row Exp(1),
// diagonal Exp(1/2 + w 2^{-1/3} N^{-1/3}); bounded by C times the shape with
// C fitted at the anchor.
inline void add_rhp_checks(Report& rep, const RhpConfig& cfg, const RunOptions& run)
{
    const double n = static_cast<double>(cfg.N);
    const double sigma = std::cbrt(16.0 * n);
    for (double mu : cfg.mu) {
        if (!(mu > 0.0 && mu < 4.0)) throw domain_error("rhp: mu must lie in (0,4)");
    }
    const auto xs = run_replicas(run.replicas, run.seed0, run.threads, [&](std::int64_t, std::uint64_t s) {
        std::vector<double> out;
        for (double w : cfg.w) {
            const AlphaBeta ab{w / std::cbrt(2.0 * n), 0.5};
            out.push_back(last_passage(Environment(EnvironmentSpec{ab, cfg.N, s, 0}), LatticePoint{0, 0},
                                       LatticePoint{cfg.N, cfg.N}));
        }
        return out;
    });
    const std::int64_t reps = run.replicas;
    auto prob = [&](std::size_t wi, double w, double mu) {
        const double x = 4.0 * n + mu * w * w * sigma;
        std::int64_t hits = 0;
        for (const auto& v : xs) hits += v[wi] <= x;
        return fraction(hits, reps);
    };
    const auto ai = std::find(cfg.w.begin(), cfg.w.end(), cfg.anchor_w);
    if (ai == cfg.w.end()) throw domain_error("rhp: anchor w is not in the w grid");
    const double p_anchor = prob(static_cast<std::size_t>(ai - cfg.w.begin()), cfg.anchor_w, cfg.anchor_mu);
    if (p_anchor < censor_level(reps)) throw domain_error("rhp: anchor probability is censored");
    const double C = p_anchor / rhp_shape(cfg.anchor_w, cfg.anchor_mu);
    rep.add("rhp.C", C, binomial_stderr(p_anchor, reps) / rhp_shape(cfg.anchor_w, cfg.anchor_mu));
    bool all = true;
    for (std::size_t wi = 0; wi < cfg.w.size(); ++wi) {
        for (double mu : cfg.mu) {
            const double w = cfg.w[wi];
            const double p = prob(wi, w, mu), se = binomial_stderr(p, reps), b = C * rhp_shape(w, mu);
            const std::string at = "[w=" + format_real(w) + ",mu=" + format_real(mu) + "]";
            const bool censored = p < censor_level(reps);
            rep.add("rhp.empirical" + at, p, se);
            rep.add("rhp.bound" + at, b);
            rep.add("rhp.censored" + at, censored ? 1.0 : 0.0);
            if (censored) continue;
            if (!(p <= b + 3.0 * se)) {
                all = false;
                rep.failures.push_back("diagonal lower tail above C e^{w^3(8/3 - 2mu + 2/3 mu^{3/2})} at " + at);
            }
        }
    }
    rep.add("rhp.satisfied", all ? 1.0 : 0.0);
}

struct TailsConfig {
    RandomWalkConfig walk;
    LppTailConfig lpp;
    RhpConfig rhp;
    bool with_walk = true;
    bool with_lpp = true;
    bool with_rhp = true;
};

inline Report tails_experiment(const TailsConfig& cfg, const RunOptions& run)
{
    Report rep{"tails", FrameParams{.N = cfg.lpp.N}, run, {}, {}};
    if (cfg.with_walk) add_random_walk_checks(rep, cfg.walk, run);
    if (cfg.with_lpp) add_lpp_tail_checks(rep, cfg.lpp, run);
    if (cfg.with_rhp) add_rhp_checks(rep, cfg.rhp, run);
    return rep;
}

} // namespace hslpp::experiments
