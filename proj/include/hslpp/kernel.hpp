#pragma once

// Pfaffian correlation kernel of the zero-diagonal half-space model and the
// Fredholm Pfaffian giving the distribution function of its last-passage
// time. Endpoint q = (N_tilde, N_tilde - n_tilde - 1); bottom row
// Exp(1/2 + beta_tilde), bulk Exp(1), zero diagonal.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lattice.hpp"
#include "pfaffian.hpp"

namespace hslpp {

using cplx = std::complex<double>;

class refinement_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KernelParams {
    std::int64_t N = 0;       // system size, sets the fluctuation unit
    std::int64_t N_tilde = 0; // first coordinate of q
    std::int64_t n_tilde = 0; // q1 - q2 - 1
    double beta_tilde = 0.0;
    double alpha_tilde = 0.5;
    double contour_radius = 0.5;
    int quad_points = 384; // trapezoid nodes per contour
};

inline void validate(const KernelParams& p)
{
    if (!(p.beta_tilde > 0.0 && p.beta_tilde < 1.0)) throw domain_error("kernel: beta_tilde must lie in (0,1)");
    if (!(p.alpha_tilde + p.beta_tilde > 0.0)) throw domain_error("kernel: alpha_tilde + beta_tilde must be positive");
    if (p.n_tilde < 0 || p.N_tilde < p.n_tilde + 1) throw domain_error("kernel: endpoint must lie strictly below the diagonal");
    if (!(p.contour_radius > 0.0 && p.contour_radius < 0.5)) throw domain_error("kernel: contour radius must lie in (0,1/2)");
    if (p.quad_points < 8) throw domain_error("kernel: too few contour nodes");
}

inline double fluctuation_unit(std::int64_t N) { return std::cbrt(16.0 * static_cast<double>(N)); }

inline KernelParams kernel_params_for_point(std::int64_t N, const LatticePoint& q, double beta_tilde, int quad_points = 384)
{
    KernelParams p;
    p.N = N;
    p.N_tilde = q.i;
    p.n_tilde = q.i - q.j - 1;
    p.beta_tilde = beta_tilde;
    p.contour_radius = 0.5 * (1.0 - beta_tilde);
    p.quad_points = quad_points;
    validate(p);
    return p;
}

// q = (N + m, N - m) with m = floor(u2 (2N)^{2/3}); beta_tilde = gap / (2^{4/3} N^{1/3}).
inline KernelParams make_kernel_params(std::int64_t N, double u2, double gap, int quad_points = 384)
{
    const double n = static_cast<double>(N);
    const auto m = static_cast<std::int64_t>(std::floor(u2 * std::cbrt(4.0 * n * n)));
    return kernel_params_for_point(N, {N + m, N - m}, gap / fluctuation_unit(N), quad_points);
}

inline cplx log_phi(double x, cplx z, const KernelParams& p)
{
    return -x * z + static_cast<double>(p.N_tilde - 1) * (std::log(0.5 + z) - std::log(0.5 - z));
}

inline cplx phi(double x, cplx z, const KernelParams& p)
{
    if (std::abs(z - 0.5) < 1e-12 || std::abs(z + 0.5) < 1e-12) throw domain_error("phi: z too close to a pole at +-1/2");
    return std::exp(log_phi(x, z, p));
}

// Antisymmetric single-integral part of K22, as sign * exp(log_abs).
struct SignedLog {
    double sign = 0.0;
    double log_abs = -std::numeric_limits<double>::infinity();
    double value() const { return sign == 0.0 ? 0.0 : sign * std::exp(log_abs); }
};

inline SignedLog eps_tilde_log(double x, double y, const KernelParams& p, int nodes = 0)
{
    if (x == y) return {};
    const double d = std::fabs(x - y);
    const double k = static_cast<double>(p.n_tilde + 1);
    // Circle around 1/2 through 1/2 - r; r minimizes the integrand there.
    auto g = [&](double r) { return std::log(1.0 - r) - (0.5 - r) * d - k * (std::log(r) + std::log(1.0 - r)); };
    double lo = 1e-6, hi = 0.98;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) * 0.381966, m2 = hi - (hi - lo) * 0.381966;
        if (g(m1) < g(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    const double r = 0.5 * (lo + hi);
    const int n = nodes > 0 ? nodes : std::max(p.quad_points, 128);
    std::vector<cplx> terms(static_cast<std::size_t>(n));
    double top = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const double th = 2.0 * std::numbers::pi * j / n;
        const cplx e = std::polar(1.0, th);
        const cplx z = 0.5 - r * e;
        // dz/(2 pi i) = -r e^{i th} dth / (2 pi), oriented counterclockwise.
        const cplx t = std::log(2.0 * z) - z * d - k * (std::log(0.5 - z) + std::log(0.5 + z)) + std::log(-r * e / double(n));
        terms[static_cast<std::size_t>(j)] = t;
        top = std::max(top, t.real());
    }
    cplx s = 0.0;
    for (const auto& t : terms) s += std::exp(t - top);
    const double re = s.real();
    if (re == 0.0) return {};
    // Sign fixed against exactly solvable small systems: eps(x, y) = +sgn(x - y) * integral.
    const double sgn = (x > y ? 1.0 : -1.0) * (re > 0 ? 1.0 : -1.0);
    return {sgn, top + std::log(std::fabs(re))};
}

inline double eps_tilde(double x, double y, const KernelParams& p) { return eps_tilde_log(x, y, p).value(); }

struct KernelValue {
    cplx k11, k12, k22; // k22 includes eps_term
    double eps_term = 0.0;
};

// Kernel on a set of points, computed in factored log-scaled form:
// K_ab(x, y) = sign * exp(ea(x) + eb(y)) * [A_a G_ab B_b^T](x, y).
class KernelEvaluator {
public:
    explicit KernelEvaluator(const KernelParams& p) : p_(p)
    {
        validate(p);
        const int n = p.quad_points;
        const double R = p.contour_radius;
        z_.resize(n);
        w_.resize(n);
        lcz_.resize(n);
        lcw_.resize(n);
        for (int k = 0; k < n; ++k) {
            const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
            z_[k] = 0.5 - R * e;
            w_[k] = -0.5 + R * e;
            lcz_[k] = std::log(-R * e / double(n));
            lcw_[k] = std::log(R * e / double(n));
        }
        const double b = p.beta_tilde;
        g11_.resize(n, n);
        g12_.resize(n, n);
        g22_.resize(n, n);
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
                const cplx z = z_[k], w = w_[l];
                const cplx rf = (z + b) * (w - b) / ((z - b) * (w + b)) / (z - w);
                g22_(k, l) = (z + w) * rf;
                g12_(k, l) = 0.5 * g22_(k, l);
                g11_(k, l) = 0.25 * g22_(k, l);
            }
        }
    }

    const KernelParams& params() const { return p_; }

    struct Side {
        Eigen::MatrixXcd m; // rows: points, cols: contour nodes, scaled by exp(-s)
        Eigen::VectorXd s;
    };

    // which: 11 -> z-side of K11/K12, 22 -> z-side of K22,
    //        -11 -> w-side of K11, -12 -> w-side of K12/K22.
    Side side(int which, const std::vector<double>& xs) const
    {
        const int n = p_.quad_points;
        const double nt = static_cast<double>(p_.n_tilde);
        Side out;
        out.m.resize(static_cast<Eigen::Index>(xs.size()), n);
        out.s.resize(static_cast<Eigen::Index>(xs.size()));
        std::vector<cplx> lg(static_cast<std::size_t>(n));
        for (std::size_t r = 0; r < xs.size(); ++r) {
            const double x = xs[r];
            double top = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < n; ++k) {
                cplx v;
                if (which == 11) {
                    const cplx z = z_[k];
                    v = log_phi(x, z, p_) + nt * std::log(0.5 - z) + std::log(z + 0.5) - std::log(z) + lcz_[k];
                } else if (which == 22) {
                    const cplx z = z_[k];
                    v = log_phi(x, z, p_) - nt * std::log(0.5 + z) - std::log(z - 0.5) + lcz_[k];
                } else if (which == -11) {
                    const cplx w = w_[k];
                    v = -log_phi(x, w, p_) + nt * std::log(0.5 + w) + std::log(w - 0.5) - std::log(w) + lcw_[k];
                } else {
                    const cplx w = w_[k];
                    v = -log_phi(x, w, p_) - nt * std::log(0.5 - w) - std::log(w + 0.5) + lcw_[k];
                }
                lg[static_cast<std::size_t>(k)] = v;
                top = std::max(top, v.real());
            }
            out.s(static_cast<Eigen::Index>(r)) = top;
            for (int k = 0; k < n; ++k) out.m(static_cast<Eigen::Index>(r), k) = std::exp(lg[static_cast<std::size_t>(k)] - top);
        }
        return out;
    }

    // Unconjugated entries at (x, y). Overflows for large N; use the
    // conjugated matrix below for Fredholm evaluations.
    KernelValue entry(double x, double y) const
    {
        const std::vector<double> xs{x}, ys{y};
        const auto a11 = side(11, xs), a22 = side(22, xs), b11 = side(-11, ys), b12 = side(-12, ys);
        KernelValue v;
        v.k11 = -(a11.m * g11_ * b11.m.transpose())(0, 0) * std::exp(a11.s(0) + b11.s(0));
        v.k12 = -(a11.m * g12_ * b12.m.transpose())(0, 0) * std::exp(a11.s(0) + b12.s(0));
        v.eps_term = eps_tilde(x, y, p_);
        v.k22 = (a22.m * g22_ * b12.m.transpose())(0, 0) * std::exp(a22.s(0) + b12.s(0)) + v.eps_term;
        return v;
    }

    // Conjugated kernel blocks diag(e^f, e^-f) K diag(e^f, e^-f) on the nodes,
    // with f chosen per node to balance the two diagonal blocks. The
    // conjugation leaves Pf(J - K) unchanged.
    struct Blocks {
        Eigen::MatrixXd k11, k12, k22;
        Eigen::VectorXd f;
        double max_imag_ratio = 0.0; // max |Im| over max |Re| across all entries
    };

    Blocks conjugated(const std::vector<double>& xs) const
    {
        const auto a11 = side(11, xs), a22 = side(22, xs), b11 = side(-11, xs), b12 = side(-12, xs);
        const auto q = static_cast<Eigen::Index>(xs.size());
        Blocks out;
        out.f = 0.5 * (a22.s - a11.s);
        const Eigen::MatrixXcd m11 = a11.m * g11_ * b11.m.transpose();
        const Eigen::MatrixXcd m12 = a11.m * g12_ * b12.m.transpose();
        const Eigen::MatrixXcd m22 = a22.m * g22_ * b12.m.transpose();
        out.k11.resize(q, q);
        out.k12.resize(q, q);
        out.k22.resize(q, q);
        double max_im = 0.0, max_re = 0.0;
        auto track = [&](const cplx& c) {
            max_im = std::max(max_im, std::fabs(c.imag()));
            max_re = std::max(max_re, std::fabs(c.real()));
        };
        for (Eigen::Index i = 0; i < q; ++i) {
            for (Eigen::Index j = 0; j < q; ++j) {
                const double e11 = a11.s(i) + out.f(i) + b11.s(j) + out.f(j);
                const double e12 = a11.s(i) + out.f(i) + b12.s(j) - out.f(j);
                const double e22 = a22.s(i) - out.f(i) + b12.s(j) - out.f(j);
                const cplx c11 = -m11(i, j) * std::exp(e11);
                const cplx c12 = -m12(i, j) * std::exp(e12);
                const cplx c22 = m22(i, j) * std::exp(e22);
                track(c11);
                track(c12);
                track(c22);
                const auto eps = eps_tilde_log(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)], p_);
                const double epsc = eps.sign == 0.0 ? 0.0 : eps.sign * std::exp(eps.log_abs - out.f(i) - out.f(j));
                out.k11(i, j) = c11.real();
                out.k12(i, j) = c12.real();
                out.k22(i, j) = c22.real() + epsc;
            }
        }
        out.max_imag_ratio = max_re > 0 ? max_im / max_re : 0.0;
        return out;
    }

private:
    KernelParams p_;
    std::vector<cplx> z_, w_, lcz_, lcw_;
    Eigen::MatrixXcd g11_, g12_, g22_;
};

inline cplx kernel_entry(int which, double x, double y, const KernelParams& p)
{
    const auto v = KernelEvaluator(p).entry(x, y);
    switch (which) {
    case 11: return v.k11;
    case 12: return v.k12;
    case 21: return -KernelEvaluator(p).entry(y, x).k12;
    case 22: return v.k22;
    default: throw domain_error("kernel_entry: which must be 11, 12, 21 or 22");
    }
}

// kernel_entry, refused unless doubling the contour nodes changes the value
// by at most rel_tol (relative to max(|value|, floor)).
inline cplx kernel_entry_converged(int which, double x, double y, KernelParams p, double rel_tol = 1e-8,
                                   double floor = 1e-300)
{
    const cplx a = kernel_entry(which, x, y, p);
    p.quad_points *= 2;
    const cplx b = kernel_entry(which, x, y, p);
    if (std::abs(a - b) > rel_tol * std::max(std::abs(b), floor)) {
        throw refinement_error("kernel_entry: contour quadrature not converged");
    }
    return b;
}

// Gauss-Legendre rule on (0, 1) by the Golub-Welsch eigenvalue method.
inline void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jac(k, k - 1) = b;
        jac(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double v0 = es.eigenvectors()(0, k);
        nodes[static_cast<std::size_t>(k)] = 0.5 * (es.eigenvalues()(k) + 1.0);
        weights[static_cast<std::size_t>(k)] = v0 * v0; // 2 v0^2 on (-1,1), halved on (0,1)
    }
}

struct QuadratureSpec {
    int nodes = 40;        // Gauss-Legendre nodes on the half-line
    double scale = 0.0;    // x = S + scale t/(1-t); 0 means the fluctuation unit of N
    double tolerance = 1e-4; // largest acceptable truncation bound
};

struct FredholmResult {
    double cdf = 1.0;              // series truncated at m_max
    double full = 1.0;             // Pf(J - K) on the quadrature grid (all orders)
    double truncation_bound = 0.0; // sum of |terms| beyond m_max
    std::vector<double> terms;     // series terms m = 0..nodes
    int quad_points = 0;
    int contour_points = 0;
    double max_imag_ratio = 0.0;
    bool conclusive = true;
};

// Skew matrix K-hat on 2Q x 2Q, rows ordered (x_1; 1), (x_1; 2), (x_2; 1), ...
inline Eigen::MatrixXd nystrom_matrix(const KernelEvaluator::Blocks& b, const std::vector<double>& wts)
{
    const auto q = static_cast<Eigen::Index>(wts.size());
    Eigen::MatrixXd k(2 * q, 2 * q);
    for (Eigen::Index i = 0; i < q; ++i) {
        for (Eigen::Index j = 0; j < q; ++j) {
            const double s = std::sqrt(wts[static_cast<std::size_t>(i)] * wts[static_cast<std::size_t>(j)]);
            k(2 * i, 2 * j) = s * b.k11(i, j);
            k(2 * i, 2 * j + 1) = s * b.k12(i, j);
            k(2 * i + 1, 2 * j) = -s * b.k12(j, i);
            k(2 * i + 1, 2 * j + 1) = s * b.k22(i, j);
        }
    }
    // Remove rounding asymmetry in the diagonal blocks.
    return 0.5 * (k - k.transpose());
}

// Coefficients c_m of Pf(J - z K) = sum_m c_m z^m, from values on the unit circle.
inline std::vector<double> pfaffian_series(const Eigen::MatrixXd& khat)
{
    const Eigen::Index dim = khat.rows();
    const Eigen::Index q = dim / 2;
    const Eigen::Index m = q + 1;
    Eigen::MatrixXcd jm = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < q; ++i) {
        jm(2 * i, 2 * i + 1) = 1.0;
        jm(2 * i + 1, 2 * i) = -1.0;
    }
    std::vector<cplx> vals(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
        vals[static_cast<std::size_t>(j)] = pfaffian<cplx>(jm - z * khat.cast<cplx>(), 1e-9);
    }
    std::vector<double> c(static_cast<std::size_t>(m));
    for (Eigen::Index k = 0; k < m; ++k) {
        cplx s = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            s += vals[static_cast<std::size_t>(j)] *
                 std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j * k % m) / static_cast<double>(m));
        }
        c[static_cast<std::size_t>(k)] = (s / static_cast<double>(m)).real();
    }
    return c;
}

inline FredholmResult fredholm_pfaffian_cdf(double S, const KernelParams& p, int m_max = 8, QuadratureSpec quad = {})
{
    if (m_max < 0) throw domain_error("fredholm_pfaffian_cdf: m_max must be nonnegative");
    FredholmResult res;
    res.quad_points = quad.nodes;
    res.contour_points = p.quad_points;
    if (std::isinf(S) && S > 0) {
        res.terms = {1.0};
        return res;
    }
    const double scale = quad.scale > 0 ? quad.scale : fluctuation_unit(p.N);
    std::vector<double> t, gw;
    gauss_legendre_unit(quad.nodes, t, gw);
    std::vector<double> xs(t.size()), wts(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        xs[k] = S + scale * t[k] / (1.0 - t[k]);
        wts[k] = gw[k] * scale / ((1.0 - t[k]) * (1.0 - t[k]));
    }
    const KernelEvaluator ev(p);
    const auto blocks = ev.conjugated(xs);
    res.max_imag_ratio = blocks.max_imag_ratio;
    const auto khat = nystrom_matrix(blocks, wts);
    res.terms = pfaffian_series(khat);

    Eigen::MatrixXd jk = -khat;
    for (Eigen::Index i = 0; i < khat.rows() / 2; ++i) {
        jk(2 * i, 2 * i + 1) += 1.0;
        jk(2 * i + 1, 2 * i) -= 1.0;
    }
    res.full = pfaffian<double>(jk, 1e-9);
    res.cdf = 0.0;
    res.truncation_bound = 0.0;
    for (std::size_t m = 0; m < res.terms.size(); ++m) {
        if (static_cast<int>(m) <= m_max) {
            res.cdf += res.terms[m];
        } else {
            res.truncation_bound += std::fabs(res.terms[m]);
        }
    }
    res.conclusive = res.truncation_bound <= quad.tolerance;
    return res;
}

} // namespace hslpp
