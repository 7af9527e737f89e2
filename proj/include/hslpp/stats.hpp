#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace hslpp {

// Neumaier-compensated sum.
class KahanSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_mean(std::span<const double> xs)
{
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value() / static_cast<double>(xs.size());
}

struct Estimate {
    double mean = 0.0;
    double variance = 0.0; // sample variance of the observations
    double stderr_ = 0.0;  // sqrt(variance / n)
    std::int64_t n = 0;
    std::uint64_t seed0 = 0;
};

inline Estimate estimate(std::span<const double> xs, std::uint64_t seed0 = 0)
{
    if (xs.size() < 2) throw std::invalid_argument("estimate: need at least two observations");
    Estimate e;
    e.n = static_cast<std::int64_t>(xs.size());
    e.seed0 = seed0;
    e.mean = compensated_mean(xs);
    KahanSum ss;
    for (double x : xs) ss.add((x - e.mean) * (x - e.mean));
    e.variance = ss.value() / static_cast<double>(e.n - 1);
    e.stderr_ = std::sqrt(e.variance / static_cast<double>(e.n));
    return e;
}

// Sample covariance (n - 1 normalization) by two passes.
inline double sample_covariance(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("sample_covariance: size mismatch");
    const double mx = compensated_mean(x), my = compensated_mean(y);
    KahanSum s;
    for (std::size_t k = 0; k < x.size(); ++k) s.add((x[k] - mx) * (y[k] - my));
    return s.value() / static_cast<double>(x.size() - 1);
}

// Large-sample standard error of the sample variance.
inline double variance_stderr(std::span<const double> xs)
{
    const auto n = static_cast<double>(xs.size());
    const double m = compensated_mean(xs);
    KahanSum s2, s4;
    for (double x : xs) {
        const double d2 = (x - m) * (x - m);
        s2.add(d2);
        s4.add(d2 * d2);
    }
    const double m2 = s2.value() / n, m4 = s4.value() / n;
    return std::sqrt(std::max(0.0, (m4 - m2 * m2) / n));
}

// Large-sample standard error of the sample covariance.
inline double covariance_stderr(std::span<const double> x, std::span<const double> y)
{
    const auto n = static_cast<double>(x.size());
    const double mx = compensated_mean(x), my = compensated_mean(y);
    KahanSum s1, s2;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double p = (x[k] - mx) * (y[k] - my);
        s1.add(p);
        s2.add(p * p);
    }
    const double c = s1.value() / n;
    return std::sqrt(std::max(0.0, (s2.value() / n - c * c) / n));
}

inline double binomial_stderr(double p, std::int64_t n) { return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n)); }

// Empirical probabilities below this are censored (too few hits to trust).
inline double censor_level(std::int64_t n) { return 10.0 / static_cast<double>(n); }

struct BoundCheck {
    std::vector<double> abscissae;
    std::vector<double> empirical;
    std::vector<double> bound;
    std::vector<double> stderr_;
    std::vector<bool> censored;
    std::int64_t n = 0;
    bool satisfied = true;

    void add(double x, double p, double b, std::int64_t trials)
    {
        abscissae.push_back(x);
        empirical.push_back(p);
        bound.push_back(b);
        const double se = binomial_stderr(p, trials);
        stderr_.push_back(se);
        censored.push_back(p < censor_level(trials));
        n = trials;
        if (!(p <= b + 3.0 * se)) satisfied = false;
    }
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

inline LinearFit least_squares(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need two or more points");
    const double mx = compensated_mean(x), my = compensated_mean(y);
    KahanSum sxx, sxy, syy;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx.add((x[k] - mx) * (x[k] - mx));
        sxy.add((x[k] - mx) * (y[k] - my));
        syy.add((y[k] - my) * (y[k] - my));
    }
    LinearFit f;
    f.points = x.size();
    f.slope = sxy.value() / sxx.value();
    f.intercept = my - f.slope * mx;
    f.r2 = syy.value() > 0.0 ? sxy.value() * sxy.value() / (sxx.value() * syy.value()) : 1.0;
    return f;
}

// Asymptotic Kolmogorov survival function P(sqrt(n) D > lambda).
inline double kolmogorov_pvalue(double lambda)
{
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

inline constexpr double kKsCritical1pct = 1.6276;

struct KsResult {
    double statistic = 0.0;   // sup distance D
    double critical = 0.0;    // 1% critical value for D
    double p_value = 1.0;
    bool pass = true;
};

inline KsResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf)
{
    std::sort(xs.begin(), xs.end());
    const auto n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double f = cdf(xs[k]);
        d = std::max({d, f - static_cast<double>(k) / n, static_cast<double>(k + 1) / n - f});
    }
    KsResult r;
    r.statistic = d;
    r.critical = kKsCritical1pct / std::sqrt(n);
    r.p_value = kolmogorov_pvalue(std::sqrt(n) * d);
    r.pass = d < r.critical;
    return r;
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    const double ne = na * nb / (na + nb);
    KsResult r;
    r.statistic = d;
    r.critical = kKsCritical1pct / std::sqrt(ne);
    r.p_value = kolmogorov_pvalue(std::sqrt(ne) * d);
    r.pass = d < r.critical;
    return r;
}

} // namespace hslpp
