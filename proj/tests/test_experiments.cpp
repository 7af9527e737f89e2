#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <hslpp/experiments/comparisons.hpp>
#include <hslpp/experiments/covariance.hpp>
#include <hslpp/experiments/crossing.hpp>
#include <hslpp/experiments/localization.hpp>
#include <hslpp/experiments/modulus.hpp>
#include <hslpp/experiments/tails.hpp>

using namespace hslpp;
using namespace hslpp::experiments;

namespace {

std::string csv_of(const Report& r)
{
    std::ostringstream os;
    write_csv(os, r);
    return os.str();
}

} // namespace

TEST(Report, FormatReal)
{
    EXPECT_EQ(format_real(0.5), "0.5");
    EXPECT_EQ(format_real(std::nan("")), "nan");
    EXPECT_EQ(format_real(INFINITY), "inf");
    EXPECT_EQ(format_real(-INFINITY), "-inf");
    EXPECT_EQ(std::stod(format_real(0.1)), 0.1);
}

TEST(Report, CsvHeaderAndRow)
{
    Report r{"x", FrameParams{.N = 7}, RunOptions{3, 9, 1}, {}, {}};
    r.add("a", 1.5, 0.25);
    const auto s = csv_of(r);
    EXPECT_EQ(s.substr(0, s.find('\n')), kCsvHeader);
    EXPECT_NE(s.find("x,7,"), std::string::npos);
    EXPECT_NE(s.find(",a,1.5,0.25,3,9\n"), std::string::npos);
}

TEST(Comparisons, NoViolationsSmall)
{
    ComparisonConfig cfg;
    cfg.frame.N = 40;
    cfg.pairs = 20;
    const auto rep = check_comparisons(cfg, RunOptions{60, 5, 1});
    EXPECT_TRUE(rep.ok()) << rep.failures.front();
    EXPECT_EQ(rep.value("pairs"), 1200.0);
    EXPECT_EQ(rep.value("violations.pp_vs_stationary"), 0.0);
}

// The reversed ordering must fail on most pairs, otherwise the check is vacuous.
TEST(Comparisons, ReversedInequalityIsDetected)
{
    const ScalingFrame f(FrameParams{.N = 40, .delta = 0.0, .kappa = 1.0});
    const double rho_plus = f.rho() + (f.rho() - f.rho_minus());
    int reversed = 0, total = 0;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const auto pp = build_table(Environment(EnvironmentSpec{PointToPoint{f.alpha()}, 40, s, 0}), {0, 0}, {40, 40});
        const auto st = build_table(Environment(EnvironmentSpec{StationaryRho{rho_plus}, 40, s, 0}), {0, 0}, {40, 40});
        const LatticePoint p{20, 5}, q{35, 1};
        const double d_pp = pp.value(q) - pp.value(p), d_st = st.value(q) - st.value(p);
        ++total;
        reversed += !leq_rounded(d_st, d_pp);
    }
    EXPECT_GT(reversed, total / 2);
}

TEST(Comparisons, EqualPointsGiveZeroIncrement)
{
    const auto t = build_table(Environment(EnvironmentSpec{StationaryRho{0.5}, 10, 3, 0}), {0, 0}, {10, 10});
    EXPECT_EQ(t.value({6, 2}) - t.value({6, 2}), 0.0);
    EXPECT_TRUE(leq_rounded(0.0, 0.0));
    EXPECT_FALSE(leq_rounded(1e-6, 0.0));
}

TEST(Comparisons, RejectsBadParameters)
{
    ComparisonConfig cfg;
    cfg.pairs = 0;
    EXPECT_THROW(check_comparisons(cfg, RunOptions{2, 1, 1}), domain_error);
    cfg.pairs = 1;
    cfg.frame.kappa = 0.0;
    EXPECT_THROW(check_comparisons(cfg, RunOptions{2, 1, 1}), domain_error);
}

TEST(Crossing, SmallSweepIsConsistent)
{
    CrossingConfig cfg;
    cfg.N = 80;
    cfg.gaps = {2.0, 4.0};
    cfg.min_probability = 0.0;
    const auto rep = crossing_sweep(cfg, RunOptions{80, 2, 1});
    EXPECT_EQ(rep.value("touch_without_cross[gap=4]"), 0.0);
    EXPECT_EQ(rep.value("violations.increment[gap=4]"), 0.0);
    const double p = rep.value("p_cross[gap=4]");
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
}

TEST(Localization, ZeroOffsetLineIsAlwaysHit)
{
    LocalizationConfig cfg;
    cfg.N = 60;
    cfg.m_values = {0.0};
    const auto rep = localization_profile(cfg, RunOptions{50, 4, 1});
    for (const char* m : kLocalizationModels) {
        EXPECT_EQ(rep.value(std::string("p_hit.") + m + "[M=0]"), 1.0) << m;
    }
    EXPECT_EQ(rep.value("order_violations"), 0.0);
}

TEST(Covariance, IdentityHoldsExactly)
{
    std::vector<double> x1, xt;
    CounterRng rng(11);
    for (int k = 0; k < 2000; ++k) {
        const double a = rng.exponential(1.0), b = rng.exponential(2.0);
        x1.push_back(a + b);
        xt.push_back(a);
    }
    const auto r = two_time_moments(x1, xt, 1);
    EXPECT_LE(r.identity_residual, 1e-12);
    EXPECT_NEAR(r.var_diff.mean, r.var1.mean + r.var_tau.mean - 2.0 * r.cov.mean, 1e-12);
}

TEST(Covariance, SmallRunPassesIdentity)
{
    const auto r = two_time_covariance(FrameParams{.N = 40, .tau = 0.5}, CovModel::PointToPoint, RunOptions{1000, 3, 1});
    EXPECT_LE(r.identity_residual, 1e-12);
}

TEST(Covariance, RejectsTooFewReplicasAndBadTau)
{
    EXPECT_THROW(two_time_covariance(FrameParams{.N = 40, .tau = 0.5}, CovModel::Stationary, RunOptions{999, 1, 1}),
                 domain_error);
    EXPECT_THROW(two_time_covariance(FrameParams{.N = 40, .tau = 1.0}, CovModel::Stationary, RunOptions{1000, 1, 1}),
                 domain_error);
}

TEST(OrderedRv, EqualVariablesGiveZeroLhs)
{
    const std::vector<double> a{0.3, -1.0, 2.0, 0.7};
    const auto r = ordered_rv_bound(a, a, 0.5, std::vector<double>{0.5, 1.0, 2.0});
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_EQ(r.k, 0.0);
    EXPECT_TRUE(r.holds);
}

// B = c, A = 0: lhs = c^2, C1 = c^4 / s^{4/3}, K = c / s^{2/3}.
TEST(OrderedRv, ConstantGapMatchesClosedForm)
{
    const double c = 0.4, tau = 0.3, s = 1.0 - tau;
    const std::vector<double> a(100, 0.0), b(100, c);
    const auto r = ordered_rv_bound(a, b, tau, std::vector<double>{1.0});
    EXPECT_DOUBLE_EQ(r.lhs, c * c);
    EXPECT_NEAR(r.c1, std::pow(c, 4) / std::pow(s, 4.0 / 3.0), 1e-14);
    EXPECT_NEAR(r.k, c / std::pow(s, 2.0 / 3.0), 1e-14);
    EXPECT_NEAR(r.rhs_star, std::pow(s, 0.8) * (1.0 + std::sqrt(r.c1 * r.k)), 1e-14);
    // At R = R* both forms of the right-hand side agree.
    EXPECT_NEAR(r.rhs[0], r.rhs_star, 1e-12);
    EXPECT_TRUE(r.holds);
}

TEST(OrderedRv, RejectsUnorderedSamples)
{
    const std::vector<double> a{1.0, 2.0}, b{1.5, 1.0};
    EXPECT_THROW(ordered_rv_bound(a, b, 0.5), domain_error);
}

TEST(RandomWalk, ZeroLevelBoundIsTwo)
{
    RandomWalkConfig cfg;
    cfg.N = 50;
    cfg.xi = {0.0};
    cfg.a3_s = {0.5};
    Report rep{"rw", FrameParams{.N = 50}, RunOptions{200, 1, 1}, {}, {}};
    add_random_walk_checks(rep, cfg, rep.run);
    EXPECT_EQ(rep.value("walk.lower.bound[x=0]"), 2.0);
    EXPECT_EQ(rep.value("walk.sup.bound[x=0]"), 1.0);
}

TEST(RandomWalk, ZeroDriftWalkIsCentred)
{
    RandomWalkConfig cfg;
    cfg.N = 200;
    double s = 0.0;
    const int n = 4000;
    for (int k = 0; k < n; ++k) s += random_walk_replica(cfg, replica_seed(7, k)).end;
    // Var W(1) is 2 for the balanced walk.
    EXPECT_NEAR(s / n, 0.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Modulus, WindowOscillation)
{
    const std::vector<double> v{0.0, 3.0, 1.0, 1.0, 5.0, 4.0};
    EXPECT_EQ(window_oscillation(v, 0), 0.0);
    EXPECT_EQ(window_oscillation(v, 1), 4.0);
    EXPECT_EQ(window_oscillation(v, 2), 4.0);
    EXPECT_EQ(window_oscillation(v, 100), 5.0);
    EXPECT_EQ(window_oscillation({}, 3), 0.0);
}

TEST(Modulus, HugeEpsilonNeverReached)
{
    ModulusConfig cfg;
    cfg.frame.N = 60;
    cfg.delta_grid = {1.0, 0.25};
    cfg.eps_grid = {1e6};
    const auto rep = modulus_of_continuity(cfg, RunOptions{30, 1, 1});
    EXPECT_EQ(rep.value("p_omega_ge_eps[delta=1,eps=1000000]"), 0.0);
    EXPECT_EQ(rep.value("p_omega_ge_eps[delta=0.25,eps=1000000]"), 0.0);
}

TEST(Modulus, FullRangeOscillatesAtTinyEpsilon)
{
    ModulusConfig cfg;
    cfg.frame.N = 60;
    cfg.delta_grid = {1.0};
    cfg.eps_grid = {1e-9};
    const auto rep = modulus_of_continuity(cfg, RunOptions{30, 1, 1});
    EXPECT_EQ(rep.value("p_omega_ge_eps[delta=1,eps=1.0000000000000001e-09]"), 1.0);
}

TEST(Determinism, CsvIndependentOfThreads)
{
    ComparisonConfig cc;
    cc.frame.N = 30;
    EXPECT_EQ(csv_of(check_comparisons(cc, RunOptions{40, 9, 1})), csv_of(check_comparisons(cc, RunOptions{40, 9, 4})));

    CrossingConfig xc;
    xc.N = 60;
    xc.gaps = {2.0};
    EXPECT_EQ(csv_of(crossing_sweep(xc, RunOptions{40, 9, 1})), csv_of(crossing_sweep(xc, RunOptions{40, 9, 3})));

    ModulusConfig mc;
    mc.frame.N = 60;
    EXPECT_EQ(csv_of(modulus_of_continuity(mc, RunOptions{25, 9, 1})),
              csv_of(modulus_of_continuity(mc, RunOptions{25, 9, 4})));
}

TEST(Determinism, SeedChangesOutput)
{
    ModulusConfig mc;
    mc.frame.N = 60;
    mc.eps_grid = {0.5};
    const auto a = modulus_replica(mc, ScalingFrame(mc.frame), replica_seed(1, 0));
    const auto b = modulus_replica(mc, ScalingFrame(mc.frame), replica_seed(2, 0));
    EXPECT_NE(a, b);
}
