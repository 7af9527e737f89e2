#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <variant>

#include "lattice.hpp"
#include "site_rng.hpp"

namespace hslpp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Diagonal Exp(rho), bottom row Exp(1 - rho).
struct StationaryRho {
    double rho = 0.5;
};

// Diagonal Exp(1/2 + alpha), zero bottom row. alpha = +inf gives a zero diagonal.
struct PointToPoint {
    double alpha = 0.0;
};

// Diagonal Exp(rho), zero bottom row. rho = +inf gives a zero diagonal.
struct PointToPointRate {
    double rho = 1.0;
};

// Zero diagonal, bottom row Exp(1 - rho_minus).
struct ZeroDiagonal {
    double rho_minus = 0.5;
};

// Diagonal Exp(1/2 + alpha), bottom row Exp(1/2 + beta).
struct AlphaBeta {
    double alpha = 0.0;
    double beta = 0.0;
};

// Exp(1) on the quadrant {i, j >= 1}, zero on both axes. The only kind
// that lives off the half-space; it shares U/V with the half-space kinds
// on {1 <= j <= i}.
struct FullSpaceSquare {};

// Stationary weights, zeroed on {i + j >= 2 tau N, i - j <= 2 m1 (2N)^{2/3}}.
struct Tilted {
    StationaryRho base;
    double tau = 0.5;
    double m1 = 0.0;
};

using ModelKind = std::variant<StationaryRho, PointToPoint, PointToPointRate, ZeroDiagonal, AlphaBeta,
                               FullSpaceSquare, Tilted>;

struct EnvironmentSpec {
    ModelKind kind = StationaryRho{};
    std::int64_t N = 0;
    std::uint64_t seed = 0;
    std::uint64_t coupling_group = 0;
};

inline const char* kind_name(const ModelKind& k)
{
    constexpr const char* names[] = {"stationary", "point_to_point", "point_to_point_rate", "zero_diagonal",
                                     "alpha_beta", "full_space_square", "tilted"};
    return names[k.index()];
}

inline bool is_stationary(const EnvironmentSpec& s) { return std::holds_alternative<StationaryRho>(s.kind); }

enum class Domain { HalfSpace, Quadrant };

inline void validate(const EnvironmentSpec& spec)
{
    auto rate_ok = [](double r) { return r > 0.0 && !std::isnan(r); };
    auto fail = [&](const std::string& what) {
        throw domain_error(std::string(kind_name(spec.kind)) + ": " + what);
    };
    if (spec.N < 0) fail("N must be nonnegative");
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, StationaryRho>) {
                if (!(k.rho > 0.0 && k.rho < 1.0)) fail("rho must lie in (0,1)");
            } else if constexpr (std::is_same_v<K, PointToPoint>) {
                const double r = 0.5 + k.alpha;
                if (!(std::isinf(r) && r > 0) && !(r > 0.0 && r <= 1.0)) fail("1/2 + alpha must lie in (0,1] or be +inf");
            } else if constexpr (std::is_same_v<K, PointToPointRate>) {
                if (!rate_ok(k.rho)) fail("rho must be positive (or +inf)");
            } else if constexpr (std::is_same_v<K, ZeroDiagonal>) {
                if (!(k.rho_minus > 0.0 && k.rho_minus < 1.0)) fail("rho_minus must lie in (0,1)");
            } else if constexpr (std::is_same_v<K, AlphaBeta>) {
                if (!(k.alpha + k.beta > 0.0)) fail("alpha + beta must be positive");
                if (!rate_ok(0.5 + k.alpha) || !rate_ok(0.5 + k.beta)) fail("1/2 + alpha and 1/2 + beta must be positive");
            } else if constexpr (std::is_same_v<K, Tilted>) {
                if (!(k.base.rho > 0.0 && k.base.rho < 1.0)) fail("rho must lie in (0,1)");
                if (!(k.tau > 0.0 && k.tau < 1.0)) fail("tau must lie in (0,1)");
                if (spec.N < 1) fail("N must be positive");
            }
        },
        spec.kind);
}

// A validated spec with its per-region rates and stream keys resolved.
// Exponentials are -ln(U)/rate; a rate of +inf yields the weight 0.
class Environment {
public:
    explicit Environment(const EnvironmentSpec& spec) : spec_(spec)
    {
        validate(spec);
        key_u_ = stream_key(spec.seed, spec.coupling_group, SiteStream::U);
        key_v_ = stream_key(spec.seed, spec.coupling_group, SiteStream::V);
        std::visit(
            [&](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, StationaryRho>) {
                    diag_rate_ = k.rho;
                    bottom_rate_ = 1.0 - k.rho;
                } else if constexpr (std::is_same_v<K, PointToPoint>) {
                    diag_rate_ = 0.5 + k.alpha;
                    bottom_rate_ = kInf;
                } else if constexpr (std::is_same_v<K, PointToPointRate>) {
                    diag_rate_ = k.rho;
                    bottom_rate_ = kInf;
                } else if constexpr (std::is_same_v<K, ZeroDiagonal>) {
                    diag_rate_ = kInf;
                    bottom_rate_ = 1.0 - k.rho_minus;
                } else if constexpr (std::is_same_v<K, AlphaBeta>) {
                    diag_rate_ = 0.5 + k.alpha;
                    bottom_rate_ = 0.5 + k.beta;
                } else if constexpr (std::is_same_v<K, FullSpaceSquare>) {
                    domain_ = Domain::Quadrant;
                    diag_rate_ = 1.0;
                    bottom_rate_ = kInf;
                } else if constexpr (std::is_same_v<K, Tilted>) {
                    diag_rate_ = k.base.rho;
                    bottom_rate_ = 1.0 - k.base.rho;
                    tilted_ = true;
                    const double n = static_cast<double>(spec.N);
                    tilt_level_ = 2.0 * k.tau * n;
                    tilt_gap_ = 2.0 * k.m1 * std::cbrt(2.0 * n * 2.0 * n);
                }
            },
            spec.kind);
    }

    const EnvironmentSpec& spec() const { return spec_; }
    Domain domain() const { return domain_; }
    double diagonal_rate() const { return diag_rate_; }
    double bottom_rate() const { return bottom_rate_; }

    bool contains(const LatticePoint& p) const
    {
        constexpr std::int64_t lim = std::int64_t{1} << 31;
        if (p.i >= lim || p.j >= lim) return false;
        return domain_ == Domain::Quadrant ? in_quadrant(p) : in_half_space(p);
    }

    double weight(const LatticePoint& p) const
    {
        if (!contains(p)) {
            throw domain_error("weight_at: " + to_string(p) + " is outside the environment's domain");
        }
        if (tilted_ && in_tilt_zone(p.i, p.j)) return 0.0;
        if (p.i == 0 || p.j == 0) {
            if (p.i == p.j || domain_ == Domain::Quadrant) return 0.0;
            return bulk_unit(p.i, 0) / bottom_rate_;
        }
        if (p.i == p.j) return diag_unit(p.i) / diag_rate_;
        return bulk_unit(p.i, p.j);
    }

    // Weights of the sites (d - j, j), j = jlo..jlo + out.size() - 1,
    // on anti-diagonal d. All sites must lie in the domain.
    void fill_antidiagonal(std::int64_t d, std::int64_t jlo, std::span<double> out) const
    {
        const auto n = static_cast<std::int64_t>(out.size());
        if (n == 0) return;
        const std::int64_t jhi = jlo + n - 1;
        double* w = out.data();
        const std::uint64_t ku = key_u_;
        const auto ud = static_cast<std::uint64_t>(d);
        for (std::int64_t t = 0; t < n; ++t) {
            const auto j = static_cast<std::uint64_t>(jlo + t);
            w[t] = neg_log_unit(site_bits(ku, ud - j, j));
        }
        if (jlo == 0) w[0] = (d == 0 || domain_ == Domain::Quadrant) ? 0.0 : w[0] / bottom_rate_;
        if (domain_ == Domain::Quadrant && jhi == d) w[n - 1] = 0.0;
        if (d % 2 == 0 && d > 0 && d / 2 >= jlo && d / 2 <= jhi) {
            w[d / 2 - jlo] = diag_unit(d / 2) / diag_rate_;
        }
        if (tilted_ && static_cast<double>(d) >= tilt_level_) {
            // i - j = d - 2j <= gap  <=>  j >= (d - gap) / 2
            std::int64_t jz = static_cast<std::int64_t>(std::ceil((static_cast<double>(d) - tilt_gap_) / 2.0));
            for (std::int64_t j = std::max(jz, jlo); j <= jhi; ++j) {
                if (j <= d - j) w[j - jlo] = 0.0;
            }
        }
    }

private:
    bool in_tilt_zone(std::int64_t i, std::int64_t j) const
    {
        return static_cast<double>(i + j) >= tilt_level_ && static_cast<double>(i - j) <= tilt_gap_;
    }
    double bulk_unit(std::int64_t i, std::int64_t j) const
    {
        return neg_log_unit(site_bits(key_u_, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)));
    }
    double diag_unit(std::int64_t i) const
    {
        const auto u = static_cast<std::uint64_t>(i);
        return neg_log_unit(site_bits(key_v_, u, u));
    }

    EnvironmentSpec spec_;
    Domain domain_ = Domain::HalfSpace;
    double diag_rate_ = 1.0;
    double bottom_rate_ = 1.0;
    bool tilted_ = false;
    double tilt_level_ = 0.0;
    double tilt_gap_ = 0.0;
    std::uint64_t key_u_ = 0;
    std::uint64_t key_v_ = 0;
};

inline double weight_at(const EnvironmentSpec& spec, const LatticePoint& p) { return Environment(spec).weight(p); }

// Coupled replacement of horizontal/vertical increments when the density
// is lowered from rho to rho_minus: X-hat = X-tilde + P, Y-tilde = Y-hat + Q.
struct IncrementPair {
    double x_hat;
    double y_hat;
    double p;
    double q;
};

inline IncrementPair decompose_increment_pair(double u, double v, double rho, double rho_minus)
{
    if (!(u > 0.0 && u <= 1.0 && v > 0.0 && v <= 1.0)) throw domain_error("decompose_increment_pair: uniforms must lie in (0,1]");
    if (!(rho_minus > 0.0 && rho < 1.0)) throw domain_error("decompose_increment_pair: rates must lie in (0,1)");
    if (!(rho_minus < rho)) throw domain_error("decompose_increment_pair: requires rho_minus < rho");
    const double lu = -std::log(u);
    const double lv = -std::log(v);
    const double x_hat = lu / (1.0 - rho);
    const double x_tilde = lu / (1.0 - rho_minus);
    const double y_hat = lv / rho;
    const double y_tilde = lv / rho_minus;
    return {x_hat, y_hat, x_hat - x_tilde, y_tilde - y_hat};
}

inline double increment_p_rate(double rho, double rho_minus) { return (1.0 - rho) * (1.0 - rho_minus) / (rho - rho_minus); }
inline double increment_q_rate(double rho, double rho_minus) { return rho * rho_minus / (rho - rho_minus); }

} // namespace hslpp
