#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "lattice.hpp"

namespace hslpp {

struct FrameParams {
    std::int64_t N = 100;
    double tau = 1.0;
    double delta = 0.0;
    double kappa = 0.0;
    double m1_tilde = 0.0;
    double mtau_tilde = 0.0;
};

// Scaling dictionary at system size N: lattice endpoints, densities,
// centering and the threshold S.
class ScalingFrame {
public:
    ScalingFrame() : ScalingFrame(FrameParams{}) {}

    explicit ScalingFrame(const FrameParams& p) : p_(p)
    {
        if (p.N < 1) throw domain_error("frame: N must be positive");
        if (!(p.tau > 0.0 && p.tau <= 1.0)) throw domain_error("frame: tau must lie in (0,1]");
        const double n = static_cast<double>(p.N);
        n13_ = std::cbrt(n);
        scale_ = std::cbrt(4.0 * n * n);
        sigma_ = std::cbrt(16.0) * n13_;
        rho_ = 0.5 + p.delta / sigma_;
        rho_minus_ = 0.5 + (p.delta - p.kappa) / sigma_;
        if (!(rho_ > 0.0 && rho_ < 1.0)) throw domain_error("frame: rho = " + std::to_string(rho_) + " outside (0,1)");
        if (!(rho_minus_ > 0.0 && rho_minus_ < 1.0)) {
            throw domain_error("frame: rho_minus = " + std::to_string(rho_minus_) + " outside (0,1)");
        }
        const double c = std::pow(1.0 - p.tau, 2.0 / 3.0);
        m1_ = c * p.m1_tilde;
        m_tau_ = c * p.mtau_tilde;
    }

    const FrameParams& params() const { return p_; }
    std::int64_t N() const { return p_.N; }
    double tau() const { return p_.tau; }
    double delta() const { return p_.delta; }
    double kappa() const { return p_.kappa; }

    // (2N)^{2/3}: transversal unit.
    double transversal_scale() const { return scale_; }
    // 2^{4/3} N^{1/3}: fluctuation unit.
    double fluctuation_scale() const { return sigma_; }

    double rho() const { return rho_; }
    double rho_minus() const { return rho_minus_; }
    // alpha with 1/2 + alpha = rho.
    double alpha() const { return p_.delta / sigma_; }
    // 1/2 - rho_minus.
    double beta_tilde() const { return (p_.kappa - p_.delta) / sigma_; }

    double m1() const { return m1_; }
    double m_tau() const { return m_tau_; }

    // Number of lattice steps of the transversal offset u (2N)^{2/3}.
    std::int64_t offset_steps(double u) const { return static_cast<std::int64_t>(std::floor(u * scale_)); }

    // (level N + u (2N)^{2/3}, level N - u (2N)^{2/3}) on the lattice. The
    // offset is floored once, so both coordinates stay on the anti-diagonal
    // through (floor(level N), floor(level N)).
    LatticePoint q_point(double u, double level) const
    {
        const auto base = static_cast<std::int64_t>(std::floor(level * static_cast<double>(p_.N)));
        const std::int64_t m = offset_steps(u);
        const LatticePoint q{base + m, base - m};
        if (!in_half_space(q)) {
            throw domain_error("q_point: u = " + std::to_string(u) + " gives " + to_string(q) + " outside the half-space");
        }
        return q;
    }

    double rescale_pp(double raw, double level) const
    {
        return (raw - 4.0 * level * static_cast<double>(p_.N)) / sigma_;
    }

    double threshold_S(double u2) const
    {
        const double g = p_.kappa - p_.delta;
        if (g < 0.0) throw domain_error("threshold_S: requires kappa >= delta");
        return 4.0 * static_cast<double>(p_.N) + sigma_ * (0.5 * g * g - 2.0 * u2 * g);
    }

private:
    FrameParams p_;
    double n13_ = 0.0;
    double scale_ = 0.0;
    double sigma_ = 0.0;
    double rho_ = 0.5;
    double rho_minus_ = 0.5;
    double m1_ = 0.0;
    double m_tau_ = 0.0;
};

// E L^{st,rho}(i, j) = i / (1 - rho) + j / rho.
inline double stationary_mean(const LatticePoint& p, double rho)
{
    return static_cast<double>(p.i) / (1.0 - rho) + static_cast<double>(p.j) / rho;
}

} // namespace hslpp
