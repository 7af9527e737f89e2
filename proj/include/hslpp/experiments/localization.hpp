#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "../geodesic.hpp"
#include "../replicas.hpp"
#include "report.hpp"

namespace hslpp::experiments {

struct LocalizationConfig {
    std::int64_t N = 500;
    double delta = 0.0; // sets rho = 1/2 + delta 2^{-4/3} N^{-1/3}
    double m1 = 0.0;    // endpoint offset M1
    std::vector<double> m_values{1.0, 2.0, 3.0};
    double tau = 0.5;   // start of the zero zone of the tilted model
};

inline constexpr std::array<const char*, 3> kLocalizationModels{"pp", "stationary", "tilted"};

struct LocalizationSample {
    std::array<std::int64_t, 3> reach{}; // max (i - j) along each geodesic
    int order_violations = 0;            // pp <= stationary <= tilted, pathwise
};

inline std::int64_t max_offset(const Geodesic& g)
{
    std::int64_t best = 0;
    for (const auto& p : g.points) best = std::max(best, p.i - p.j);
    return best;
}

inline LocalizationSample localization_replica(const LocalizationConfig& cfg, const ScalingFrame& f,
                                               const LatticePoint& Q, std::uint64_t seed)
{
    const ModelKind kinds[3] = {PointToPointRate{f.rho()}, StationaryRho{f.rho()},
                                Tilted{StationaryRho{f.rho()}, cfg.tau, cfg.m1}};
    Geodesic g[3];
    LocalizationSample s;
    for (int k = 0; k < 3; ++k) {
        g[k] = backtrack(last_passage_line(EnvironmentSpec{kinds[k], cfg.N, seed, 0}, Q), Q);
        s.reach[k] = max_offset(g[k]);
    }
    s.order_violations = !geodesic_ordering(g[0], g[1]) + !geodesic_ordering(g[1], g[2]);
    return s;
}

// P(geodesic to Q meets {i - j = M (2N)^{2/3}}) for each M and model.
// Decay and the cubic fit are asserted on the stationary geodesic, whose
// probabilities stay resolvable; censored points are dropped everywhere.
inline Report localization_profile(const LocalizationConfig& cfg, const RunOptions& run)
{
    const ScalingFrame f(FrameParams{.N = cfg.N, .tau = cfg.tau, .delta = cfg.delta});
    if (cfg.m_values.empty()) throw domain_error("localization: empty M list");
    for (double m : cfg.m_values) {
        if (m < cfg.m1) throw domain_error("localization: M values must be >= M1");
    }
    const LatticePoint Q = f.q_point(cfg.m1, 1.0);
    const auto xs = run_replicas(run.replicas, run.seed0, run.threads,
                                 [&](std::int64_t, std::uint64_t s) { return localization_replica(cfg, f, Q, s); });

    Report rep{"localization", FrameParams{.N = cfg.N, .tau = cfg.tau, .delta = cfg.delta, .m1_tilde = cfg.m1}, run,
               {}, {}};
    const std::int64_t n = run.replicas;
    std::int64_t order_bad = 0;
    for (const auto& x : xs) order_bad += x.order_violations;

    std::array<std::vector<double>, 3> prob, se;
    for (double m : cfg.m_values) {
        const std::int64_t level = f.offset_steps(m);
        for (int k = 0; k < 3; ++k) {
            std::int64_t hits = 0;
            for (const auto& x : xs) hits += x.reach[k] >= level;
            const double p = fraction(hits, n);
            prob[k].push_back(p);
            se[k].push_back(binomial_stderr(p, n));
            const std::string at = "[M=" + format_real(m) + "]";
            rep.add(std::string("p_hit.") + kLocalizationModels[k] + at, p, se[k].back());
            rep.add(std::string("censored.") + kLocalizationModels[k] + at, p < censor_level(n) ? 1.0 : 0.0);
        }
    }
    rep.add("order_violations", static_cast<double>(order_bad));
    rep.require(order_bad == 0, "geodesics not ordered pp <= stationary <= tilted");

    for (std::size_t t = 0; t < cfg.m_values.size(); ++t) {
        rep.require(prob[0][t] <= prob[1][t] + 3.0 * se[1][t],
                    "pp probability above stationary at M = " + format_real(cfg.m_values[t]));
    }
    for (int k = 0; k < 3; ++k) {
        std::vector<double> xk, yk;
        bool decreasing = true;
        double last = 2.0;
        for (std::size_t t = 0; t < cfg.m_values.size(); ++t) {
            if (prob[k][t] < censor_level(n)) continue;
            decreasing = decreasing && prob[k][t] < last;
            last = prob[k][t];
            xk.push_back(std::pow(cfg.m_values[t] - cfg.m1, 3.0));
            yk.push_back(std::log(prob[k][t]));
        }
        const std::string name = kLocalizationModels[k];
        rep.add("decreasing." + name, decreasing ? 1.0 : 0.0);
        rep.add("resolved_points." + name, static_cast<double>(xk.size()));
        if (xk.size() >= 3) {
            const auto fit = least_squares(xk, yk);
            rep.add("cubic_fit.slope." + name, fit.slope);
            rep.add("cubic_fit.intercept." + name, fit.intercept);
            rep.add("cubic_fit.r2." + name, fit.r2);
            if (k == 1) {
                rep.require(fit.slope < 0.0 && fit.r2 > 0.9, "stationary cubic fit: slope >= 0 or R^2 <= 0.9");
            }
        } else if (k == 1) {
            rep.require(false, "stationary profile has fewer than three resolvable points");
        }
        if (k != 2) rep.require(decreasing, name + " hit probabilities not strictly decreasing");
    }
    return rep;
}

} // namespace hslpp::experiments
