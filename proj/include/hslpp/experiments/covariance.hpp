#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "../passage.hpp"
#include "../replicas.hpp"
#include "report.hpp"

namespace hslpp::experiments {

enum class CovModel { PointToPoint, Stationary };

inline const char* to_string(CovModel m) { return m == CovModel::Stationary ? "stationary" : "pp"; }

inline ModelKind cov_kind(CovModel m, const ScalingFrame& f)
{
    if (m == CovModel::Stationary) return StationaryRho{f.rho()};
    return PointToPoint{f.alpha()};
}

struct TwoTimeResult {
    Estimate cov, var1, var_tau, var_diff;
    double identity_residual = 0.0; // relative
};

inline constexpr std::int64_t kMinCovarianceReplicas = 1000;

// Sample moments of X1 = L_N(M1, 1) and Xt = L_N(Mt, tau), rescaled.
inline TwoTimeResult two_time_moments(std::span<const double> x1, std::span<const double> xt, std::uint64_t seed0)
{
    const std::size_t n = x1.size();
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) d[k] = x1[k] - xt[k];
    TwoTimeResult r;
    r.var1 = estimate(x1, seed0);
    r.var_tau = estimate(xt, seed0);
    r.var_diff = estimate(d, seed0);
    r.cov.mean = sample_covariance(x1, xt);
    r.cov.stderr_ = covariance_stderr(x1, xt);
    r.cov.n = static_cast<std::int64_t>(n);
    r.cov.seed0 = seed0;
    // Estimates carry the variances in .variance; move them to .mean so the
    // four outputs read alike, with variance stderrs.
    for (auto* e : {&r.var1, &r.var_tau, &r.var_diff}) e->mean = e->variance;
    r.var1.stderr_ = variance_stderr(x1);
    r.var_tau.stderr_ = variance_stderr(xt);
    r.var_diff.stderr_ = variance_stderr(d);
    const double rhs = 0.5 * r.var1.mean + 0.5 * r.var_tau.mean - 0.5 * r.var_diff.mean;
    const double scale = std::max({std::fabs(r.var1.mean), std::fabs(r.var_tau.mean), std::fabs(r.cov.mean), 1e-300});
    r.identity_residual = std::fabs(r.cov.mean - rhs) / scale;
    return r;
}

struct CovarianceSamples {
    std::vector<double> x1, xt;
};

inline CovarianceSamples sample_two_time(const ScalingFrame& f, CovModel model, const RunOptions& run)
{
    const LatticePoint q1 = f.q_point(f.m1(), 1.0);
    const LatticePoint qt = f.q_point(f.m_tau(), f.tau());
    const std::array<LatticePoint, 2> ends{q1, qt};
    const auto kind = cov_kind(model, f);
    const auto pairs = run_replicas(run.replicas, run.seed0, run.threads, [&](std::int64_t, std::uint64_t s) {
        const auto v = last_passage_many(Environment(EnvironmentSpec{kind, f.N(), s, 0}), LatticePoint{0, 0}, ends);
        return std::array<double, 2>{f.rescale_pp(v[0], 1.0), f.rescale_pp(v[1], f.tau())};
    });
    CovarianceSamples out;
    for (const auto& p : pairs) {
        out.x1.push_back(p[0]);
        out.xt.push_back(p[1]);
    }
    return out;
}

inline TwoTimeResult two_time_covariance(const FrameParams& frame, CovModel model, const RunOptions& run)
{
    if (run.replicas < kMinCovarianceReplicas) {
        throw domain_error("covariance: needs at least " + std::to_string(kMinCovarianceReplicas) + " replicas");
    }
    const ScalingFrame f(frame);
    if (!(f.tau() < 1.0)) throw domain_error("covariance: tau must lie in (0,1)");
    const auto s = sample_two_time(f, model, run);
    return two_time_moments(s.x1, s.xt, run.seed0);
}

// Rescaled L^{st,rho} at ((1-tau)N, (1-tau)N), in the fluctuation unit of
// the original N: the law of the difference at times tau and 1.
inline Estimate stationary_difference_oracle(const FrameParams& frame, const RunOptions& run)
{
    const ScalingFrame f(frame);
    const std::int64_t n = f.N() - static_cast<std::int64_t>(std::floor(f.tau() * static_cast<double>(f.N())));
    const LatticePoint end{n, n};
    const auto xs = run_replicas(run.replicas, run.seed0, run.threads, [&](std::int64_t, std::uint64_t s) {
        return last_passage(Environment(EnvironmentSpec{StationaryRho{f.rho()}, f.N(), s, 1}), LatticePoint{0, 0}, end) /
               f.fluctuation_scale();
    });
    Estimate e = estimate(xs, run.seed0);
    e.mean = e.variance;
    e.stderr_ = variance_stderr(xs);
    return e;
}

inline void add_two_time_rows(Report& rep, const std::string& prefix, const TwoTimeResult& r)
{
    rep.add(prefix + "cov", r.cov);
    rep.add(prefix + "var1", r.var1);
    rep.add(prefix + "var_tau", r.var_tau);
    rep.add(prefix + "var_diff", r.var_diff);
    rep.add(prefix + "identity_residual", r.identity_residual);
}

struct CovarianceConfig {
    FrameParams frame{.N = 1000, .tau = 0.5};
    CovModel model = CovModel::Stationary;
    bool oracle = true;             // stationary only
    double oracle_tolerance = 0.1;  // absolute, on var_diff
    std::vector<double> trend_taus; // optional pp-vs-stationary sweep
};

inline Report covariance_experiment(const CovarianceConfig& cfg, const RunOptions& run)
{
    Report rep{"covariance", cfg.frame, run, {}, {}};
    const auto r = two_time_covariance(cfg.frame, cfg.model, run);
    add_two_time_rows(rep, std::string(to_string(cfg.model)) + ".", r);
    rep.require(r.identity_residual <= 1e-12, "covariance identity residual above 1e-12");

    if (cfg.oracle && cfg.model == CovModel::Stationary) {
        // Independent seeds: the oracle must not share randomness with the run.
        RunOptions o = run;
        o.seed0 = hash_combine(run.seed0, 0x0dd1ce);
        const auto ref = stationary_difference_oracle(cfg.frame, o);
        const double gap = std::fabs(r.var_diff.mean - ref.mean);
        const double se = std::hypot(r.var_diff.stderr_, ref.stderr_);
        rep.add("oracle.var_size_1_minus_tau", ref);
        rep.add("oracle.abs_difference", gap, se);
        rep.require(gap <= cfg.oracle_tolerance, "var_diff differs from the (1-tau)N stationary oracle by more than tolerance");
    }

    if (!cfg.trend_taus.empty()) {
        std::vector<double> gaps;
        for (double t : cfg.trend_taus) {
            FrameParams fp = cfg.frame;
            fp.tau = t;
            const auto pp = two_time_covariance(fp, CovModel::PointToPoint, run);
            const auto st = two_time_covariance(fp, CovModel::Stationary, run);
            const std::string at = "[tau=" + format_real(t) + "]";
            gaps.push_back(std::fabs(pp.var_diff.mean - st.var_diff.mean));
            rep.add("trend.var_diff.pp" + at, pp.var_diff);
            rep.add("trend.var_diff.stationary" + at, st.var_diff);
            rep.add("trend.abs_gap" + at, gaps.back(), std::hypot(pp.var_diff.stderr_, st.var_diff.stderr_));
        }
        bool decreasing = true;
        for (std::size_t k = 1; k < gaps.size(); ++k) decreasing = decreasing && gaps[k] < gaps[k - 1];
        // Diagnostic only: finite-N trend, not asserted.
        rep.add("trend.decreasing", decreasing ? 1.0 : 0.0);
    }
    return rep;
}

struct OrderedRvResult {
    double tau = 0.0;
    double lhs = 0.0; // E (B - A)^2
    double c1 = 0.0;  // E B^4 / (1 - tau)^{4/3}
    double k = 0.0;   // E (B - A) / (1 - tau)^{2/3}
    std::vector<double> r_grid;
    std::vector<double> rhs;   // R^2 (1-tau)^{4/3} + (1-tau)^{2/3} sqrt(C1 K / R)
    double rhs_star = 0.0;     // (1-tau)^{4/5} (1 + sqrt(C1 K))
    bool holds = true;
};

inline double ordered_rv_rhs(double r, double tau, double c1, double k)
{
    const double s = 1.0 - tau;
    return r * r * std::pow(s, 4.0 / 3.0) + std::pow(s, 2.0 / 3.0) * std::sqrt(c1 * k / r);
}

// The moment inequality for B >= A. The R grid is given in units of
// R* = (1 - tau)^{-4/15}, where the bound takes its closed form.
inline OrderedRvResult ordered_rv_bound(std::span<const double> a, std::span<const double> b, double tau,
                                        std::span<const double> r_factors = {})
{
    if (a.size() != b.size() || a.empty()) throw domain_error("ordered_rv: sample sizes differ or are empty");
    if (!(tau >= 0.0 && tau < 1.0)) throw domain_error("ordered_rv: tau must lie in [0,1)");
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!(b[k] >= a[k])) throw domain_error("ordered_rv: B < A at sample " + std::to_string(k));
    }
    KahanSum sq, b4, gap;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double g = b[k] - a[k];
        sq.add(g * g);
        gap.add(g);
        b4.add(b[k] * b[k] * b[k] * b[k]);
    }
    const double n = static_cast<double>(a.size()), s = 1.0 - tau;
    OrderedRvResult r;
    r.tau = tau;
    r.lhs = sq.value() / n;
    r.c1 = b4.value() / n / std::pow(s, 4.0 / 3.0);
    r.k = gap.value() / n / std::pow(s, 2.0 / 3.0);
    const double r_star = std::pow(s, -4.0 / 15.0);
    r.rhs_star = std::pow(s, 0.8) * (1.0 + std::sqrt(r.c1 * r.k));
    r.holds = r.lhs <= r.rhs_star;
    for (double fct : r_factors) {
        const double R = fct * r_star;
        r.r_grid.push_back(R);
        r.rhs.push_back(ordered_rv_rhs(R, tau, r.c1, r.k));
        r.holds = r.holds && r.lhs <= r.rhs.back();
    }
    return r;
}

struct OrderedRvConfig {
    FrameParams frame{.N = 500, .tau = 0.5, .delta = 0.0, .kappa = 1.0, .mtau_tilde = 1.0};
    std::vector<double> r_factors{0.25, 0.5, 1.0, 2.0, 4.0};
};

// A, B from coupled stationary models rho and rho- at time tau:
// B = L^{rho-}(0, tau) - L^{rho-}(M_tau, tau), A the same with rho.
inline std::array<std::vector<double>, 2> coupled_increment_samples(const FrameParams& frame, const RunOptions& run)
{
    const ScalingFrame f(frame);
    const LatticePoint p = f.q_point(0.0, f.tau()), q = f.q_point(f.m_tau(), f.tau());
    const std::array<LatticePoint, 2> ends{p, q};
    const auto rows = run_replicas(run.replicas, run.seed0, run.threads, [&](std::int64_t, std::uint64_t s) {
        auto inc = [&](double rho) {
            const auto v = last_passage_many(Environment(EnvironmentSpec{StationaryRho{rho}, f.N(), s, 0}),
                                             LatticePoint{0, 0}, ends);
            return (v[0] - v[1]) / f.fluctuation_scale();
        };
        return std::array<double, 2>{inc(f.rho()), inc(f.rho_minus())};
    });
    std::array<std::vector<double>, 2> out;
    for (const auto& r : rows) {
        out[0].push_back(r[0]);
        out[1].push_back(r[1]);
    }
    return out;
}

inline Report ordered_rv_experiment(const OrderedRvConfig& cfg, const RunOptions& run)
{
    Report rep{"ordered_rv", cfg.frame, run, {}, {}};
    const auto ab = coupled_increment_samples(cfg.frame, run);
    const auto r = ordered_rv_bound(ab[0], ab[1], cfg.frame.tau, cfg.r_factors);
    rep.add("lhs", r.lhs);
    rep.add("C1", r.c1);
    rep.add("K", r.k);
    rep.add("rhs_star", r.rhs_star);
    for (std::size_t k = 0; k < r.r_grid.size(); ++k) rep.add("rhs[R=" + format_real(r.r_grid[k]) + "]", r.rhs[k]);
    rep.add("holds", r.holds ? 1.0 : 0.0);
    rep.require(r.holds, "ordered random variable inequality fails on coupled increments");
    return rep;
}

} // namespace hslpp::experiments
