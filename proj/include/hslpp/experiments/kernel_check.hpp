#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "../kernel.hpp"
#include "../passage.hpp"
#include "../replicas.hpp"
#include "report.hpp"

namespace hslpp::experiments {

struct KernelConfig {
    std::int64_t N = 300;
    double u2 = 0.5;
    double gap = 3.0;                 // kappa - delta
    std::vector<double> s_grid;       // empty: automatic grid around S0
    int m_max = 8;
    QuadratureSpec quad{};
    int contour_points = 384;
};

struct KernelRow {
    double S = 0.0;
    FredholmResult r;
};

inline double kernel_threshold(const KernelConfig& cfg)
{
    return ScalingFrame(FrameParams{.N = cfg.N, .kappa = cfg.gap}).threshold_S(cfg.u2);
}

// S0 + k sigma / 2 for k = -8..4.
inline std::vector<double> auto_s_grid(const KernelConfig& cfg)
{
    const double s0 = kernel_threshold(cfg), sigma = fluctuation_unit(cfg.N);
    std::vector<double> g;
    for (int k = -8; k <= 4; ++k) g.push_back(s0 + 0.5 * k * sigma);
    return g;
}

inline std::vector<KernelRow> kernel_cdf_table(const KernelConfig& cfg)
{
    if (!(cfg.gap > 0.0)) throw domain_error("kernel: gap must be positive");
    const auto p = make_kernel_params(cfg.N, cfg.u2, cfg.gap, cfg.contour_points);
    std::vector<KernelRow> out;
    for (double s : cfg.s_grid.empty() ? auto_s_grid(cfg) : cfg.s_grid) {
        out.push_back({s, fredholm_pfaffian_cdf(s, p, cfg.m_max, cfg.quad)});
    }
    return out;
}

inline void write_kernel_csv(std::ostream& os, const std::vector<KernelRow>& rows)
{
    os << "S,cdf,truncation_bound,quad_points\n";
    for (const auto& r : rows) {
        os << format_real(r.S) << ',' << format_real(r.r.cdf) << ',' << format_real(r.r.truncation_bound) << ','
           << r.r.quad_points << '\n';
    }
}

struct KernelMcConfig {
    KernelConfig kernel;
    std::vector<double> offsets{-2.0, 0.0, 2.0}; // in units of 2^{4/3} N^{1/3}
    double tolerance = 0.02;
    double convergence_tolerance = 1e-8;
};

// Fredholm Pfaffian vs the empirical CDF of the zero-diagonal model, plus the
// change of each value when the quadrature step is halved.
inline Report kernel_vs_monte_carlo(const KernelMcConfig& cfg, const RunOptions& run)
{
    const auto& k = cfg.kernel;
    const ScalingFrame f(FrameParams{.N = k.N, .kappa = k.gap});
    const LatticePoint q = f.q_point(k.u2, 1.0);
    const auto xs = run_replicas(run.replicas, run.seed0, run.threads, [&](std::int64_t, std::uint64_t s) {
        return last_passage(Environment(EnvironmentSpec{ZeroDiagonal{f.rho_minus()}, k.N, s, 0}), LatticePoint{0, 0}, q);
    });
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());

    Report rep{"kernel_mc", FrameParams{.N = k.N, .kappa = k.gap}, run, {}, {}};
    const auto p = make_kernel_params(k.N, k.u2, k.gap, k.contour_points);
    const double s0 = f.threshold_S(k.u2), sigma = f.fluctuation_scale();
    QuadratureSpec fine = k.quad;
    fine.nodes = 2 * k.quad.nodes;
    for (double off : cfg.offsets) {
        const double S = s0 + off * sigma;
        const auto coarse = fredholm_pfaffian_cdf(S, p, k.m_max, k.quad);
        const auto refined = fredholm_pfaffian_cdf(S, p, k.m_max, fine);
        const double mc = fraction(std::upper_bound(sorted.begin(), sorted.end(), S) - sorted.begin(), run.replicas);
        const std::string at = "[offset=" + format_real(off) + "]";
        const double change = std::fabs(refined.cdf - coarse.cdf);
        rep.add("S" + at, S);
        rep.add("kernel_cdf" + at, coarse.cdf, coarse.truncation_bound);
        rep.add("mc_cdf" + at, mc, binomial_stderr(mc, run.replicas));
        rep.add("abs_difference" + at, std::fabs(coarse.cdf - mc));
        rep.add("halved_step_change" + at, change);
        rep.require(std::fabs(coarse.cdf - mc) <= cfg.tolerance, "kernel and MC CDFs differ at " + at);
        rep.require(change < cfg.convergence_tolerance, "quadrature not converged at " + at);
        rep.require(coarse.conclusive, "series truncation bound above tolerance at " + at);
    }
    return rep;
}

} // namespace hslpp::experiments
