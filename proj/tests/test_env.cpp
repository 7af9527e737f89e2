#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <hslpp/env.hpp>
#include <hslpp/env_json.hpp>
#include <hslpp/lattice.hpp>
#include <hslpp/site_rng.hpp>
#include <hslpp/stats.hpp>

#include "oracles.hpp"

using namespace hslpp;

namespace {

EnvironmentSpec make(ModelKind k, std::uint64_t seed = 7, std::uint64_t group = 1, std::int64_t N = 100)
{
    return EnvironmentSpec{k, N, seed, group};
}

} // namespace

TEST(Region, ClassifiesExamples)
{
    EXPECT_EQ(classify_region({0, 0}), RegionTag::Origin);
    EXPECT_EQ(classify_region({5, 5}), RegionTag::Diagonal);
    EXPECT_EQ(classify_region({5, 0}), RegionTag::BottomRow);
    EXPECT_EQ(classify_region({5, 2}), RegionTag::Bulk);
    EXPECT_THROW(classify_region({2, 3}), domain_error);
}

TEST(Region, TagsPartitionTheHalfSpace)
{
    for (std::int64_t i = 0; i < 40; ++i) {
        for (std::int64_t j = 0; j <= i; ++j) {
            const LatticePoint p{i, j};
            const int hits = (i == 0 && j == 0) + on_diagonal(p) + (j == 0 && i >= 1) + in_bulk(p);
            EXPECT_EQ(hits, 1) << p;
            const auto tag = classify_region(p);
            EXPECT_EQ(tag == RegionTag::Diagonal, on_diagonal(p));
            EXPECT_EQ(tag == RegionTag::Bulk, in_bulk(p));
        }
    }
}

TEST(NegLog, MatchesLibm)
{
    CounterRng rng(3);
    double worst = 0.0;
    for (int k = 0; k < 200000; ++k) {
        const auto bits = rng();
        const double ref = -std::log(unit_open0(bits));
        const double got = neg_log_unit(bits);
        ASSERT_GE(got, 0.0);
        if (ref > 0) worst = std::max(worst, std::fabs(got - ref) / ref);
    }
    EXPECT_LT(worst, 1e-15);
    EXPECT_EQ(neg_log_unit(~std::uint64_t{0}), 0.0); // u = 1
    EXPECT_NEAR(neg_log_unit(0), 53.0 * std::log(2.0), 1e-13);
}

TEST(Weights, OriginAndZeroBoundaries)
{
    EXPECT_EQ(weight_at(make(StationaryRho{0.3}), {0, 0}), 0.0);
    EXPECT_EQ(weight_at(make(AlphaBeta{0.2, 0.1}), {0, 0}), 0.0);
    EXPECT_EQ(weight_at(make(PointToPoint{0.1}), {7, 0}), 0.0);
    EXPECT_EQ(weight_at(make(PointToPointRate{1.0}), {7, 0}), 0.0);
    EXPECT_EQ(weight_at(make(ZeroDiagonal{0.4}), {7, 7}), 0.0);
    EXPECT_EQ(weight_at(make(PointToPointRate{kInf}), {7, 7}), 0.0);
    EXPECT_EQ(weight_at(make(PointToPoint{kInf}), {7, 7}), 0.0);
    EXPECT_EQ(weight_at(make(FullSpaceSquare{}), {0, 7}), 0.0);
    EXPECT_EQ(weight_at(make(FullSpaceSquare{}), {7, 0}), 0.0);
    EXPECT_GT(weight_at(make(FullSpaceSquare{}), {3, 7}), 0.0);
    EXPECT_THROW(weight_at(make(StationaryRho{0.3}), {2, 3}), domain_error);
}

TEST(Weights, RejectsInvalidKinds)
{
    EXPECT_THROW(Environment(make(StationaryRho{1.0})), domain_error);
    EXPECT_THROW(Environment(make(StationaryRho{0.0})), domain_error);
    EXPECT_THROW(Environment(make(PointToPoint{0.7})), domain_error);
    EXPECT_THROW(Environment(make(PointToPoint{-0.5})), domain_error);
    EXPECT_THROW(Environment(make(AlphaBeta{0.1, -0.1})), domain_error);
    EXPECT_THROW(Environment(make(Tilted{{0.5}, 1.0, 0.0})), domain_error);
    EXPECT_NO_THROW(Environment(make(PointToPoint{0.5})));
}

TEST(Weights, BulkSharedAcrossKindsInOneCouplingGroup)
{
    const std::vector<ModelKind> kinds = {StationaryRho{0.3},   PointToPoint{0.1}, PointToPointRate{1.0},
                                          ZeroDiagonal{0.45},  AlphaBeta{0.2, 0.3}, FullSpaceSquare{},
                                          Tilted{{0.6}, 0.9, 0.0}};
    for (std::int64_t i = 2; i < 30; ++i) {
        for (std::int64_t j = 1; j < i; ++j) {
            const double ref = weight_at(make(kinds[0]), {i, j});
            for (const auto& k : kinds) EXPECT_EQ(weight_at(make(k), {i, j}), ref);
        }
    }
    EXPECT_NE(weight_at(make(StationaryRho{0.3}, 7, 1), {5, 2}), weight_at(make(StationaryRho{0.3}, 7, 2), {5, 2}));
    EXPECT_NE(weight_at(make(StationaryRho{0.3}, 7, 1), {5, 2}), weight_at(make(StationaryRho{0.3}, 8, 1), {5, 2}));
}

TEST(Weights, FullSpaceSharesDiagonalWithPointToPointRateOne)
{
    for (std::int64_t i = 1; i < 50; ++i) {
        EXPECT_EQ(weight_at(make(FullSpaceSquare{}), {i, i}), weight_at(make(PointToPointRate{1.0}), {i, i}));
    }
}

TEST(Weights, MonotoneCouplingHoldsPathwise)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (std::int64_t i = 1; i < 200; ++i) {
            const LatticePoint d{i, i}, r{i, 0};
            EXPECT_GE(weight_at(make(StationaryRho{0.4}, seed), d), weight_at(make(StationaryRho{0.6}, seed), d));
            EXPECT_LE(weight_at(make(StationaryRho{0.4}, seed), r), weight_at(make(StationaryRho{0.6}, seed), r));
            // pp diagonal rate 1/2 + alpha <= rho_plus
            EXPECT_GE(weight_at(make(PointToPoint{0.05}, seed), d), weight_at(make(StationaryRho{0.6}, seed), d));
            EXPECT_LE(weight_at(make(PointToPoint{0.05}, seed), r), weight_at(make(StationaryRho{0.6}, seed), r));
        }
    }
}

TEST(Weights, TiltedZeroRegion)
{
    const std::int64_t N = 100;
    const double tau = 0.5, m1 = 0.1;
    const auto spec = make(Tilted{{0.5}, tau, m1}, 7, 1, N);
    const double gap = 2.0 * m1 * std::cbrt(4.0 * N * N);
    const auto base = make(StationaryRho{0.5}, 7, 1, N);
    for (std::int64_t i = 0; i < 160; ++i) {
        for (std::int64_t j = 0; j <= i; ++j) {
            const bool zone = (i + j) >= 2.0 * tau * N && (i - j) <= gap;
            if (zone) {
                EXPECT_EQ(weight_at(spec, {i, j}), 0.0);
            } else {
                EXPECT_EQ(weight_at(spec, {i, j}), weight_at(base, {i, j}));
            }
        }
    }
}

TEST(Weights, AntidiagonalFillMatchesPointwise)
{
    const std::vector<ModelKind> kinds = {StationaryRho{0.3}, PointToPoint{0.1}, ZeroDiagonal{0.45},
                                          AlphaBeta{0.2, 0.3}, FullSpaceSquare{}, Tilted{{0.6}, 0.3, 0.05}};
    for (const auto& k : kinds) {
        const Environment env(make(k, 11, 3, 40));
        const bool quad = env.domain() == Domain::Quadrant;
        for (std::int64_t d = 0; d < 90; ++d) {
            const std::int64_t hi = quad ? d : d / 2;
            std::vector<double> w(static_cast<std::size_t>(hi + 1));
            env.fill_antidiagonal(d, 0, w);
            for (std::int64_t j = 0; j <= hi; ++j) {
                EXPECT_EQ(w[static_cast<std::size_t>(j)], env.weight({d - j, j})) << kind_name(k) << " d=" << d << " j=" << j;
            }
        }
    }
}

TEST(Weights, ReproducibleAcrossInstances)
{
    const auto spec = make(AlphaBeta{0.1, 0.2}, 99, 5);
    const Environment a(spec), b(spec);
    for (std::int64_t i = 0; i < 60; ++i) {
        for (std::int64_t j = 0; j <= i; ++j) EXPECT_EQ(a.weight({i, j}), b.weight({i, j}));
    }
}

TEST(Weights, BulkMarginalIsExp1)
{
    // Same bulk site across 1e5 independent seeds.
    std::vector<double> xs;
    for (std::uint64_t s = 0; s < 100000; ++s) xs.push_back(weight_at(make(StationaryRho{0.5}, s), {17, 9}));
    const auto ks = ks_one_sample(xs, [](double x) { return oracle::exp_cdf(x, 1.0); });
    EXPECT_TRUE(ks.pass) << "D=" << ks.statistic << " crit=" << ks.critical;
}

TEST(Weights, BoundaryMarginals)
{
    std::vector<double> diag, row;
    for (std::uint64_t s = 0; s < 50000; ++s) {
        diag.push_back(weight_at(make(StationaryRho{0.3}, s), {4, 4}));
        row.push_back(weight_at(make(StationaryRho{0.3}, s), {4, 0}));
    }
    EXPECT_TRUE(ks_one_sample(diag, [](double x) { return oracle::exp_cdf(x, 0.3); }).pass);
    EXPECT_TRUE(ks_one_sample(row, [](double x) { return oracle::exp_cdf(x, 0.7); }).pass);
}

TEST(IncrementPair, ClosedFormExample)
{
    const double e1 = std::exp(-1.0);
    const auto r = decompose_increment_pair(e1, e1, 0.6, 0.4);
    EXPECT_NEAR(r.x_hat, 2.5, 1e-14);
    EXPECT_NEAR(r.y_hat, 5.0 / 3.0, 1e-14);
    EXPECT_NEAR(r.p, 5.0 / 6.0, 1e-14);
    EXPECT_NEAR(r.q, 5.0 / 6.0, 1e-14);
    EXPECT_THROW(decompose_increment_pair(0.5, 0.5, 0.4, 0.4), domain_error);
    EXPECT_THROW(decompose_increment_pair(0.5, 0.5, 0.4, 0.6), domain_error);
    EXPECT_THROW(decompose_increment_pair(0.0, 0.5, 0.6, 0.4), domain_error);
}

TEST(IncrementPair, DegenerateLimit)
{
    const auto r = decompose_increment_pair(0.3, 0.7, 0.5, 0.5 - 1e-12);
    EXPECT_LT(r.p, 1e-9);
    EXPECT_LT(r.q, 1e-9);
}

TEST(IncrementPair, LawsOfPAndQ)
{
    const double rho = 0.6, rm = 0.4;
    CounterRng rng(2024);
    std::vector<double> ps, qs;
    ps.reserve(1000000);
    for (int k = 0; k < 1000000; ++k) {
        const auto r = decompose_increment_pair(rng.uniform(), rng.uniform(), rho, rm);
        ps.push_back(r.p);
        if (k < 100000) qs.push_back(r.q);
    }
    const auto e = estimate(ps);
    const double expect = (rho - rm) / ((1 - rho) * (1 - rm));
    EXPECT_LT(std::fabs(e.mean - expect), 4 * e.stderr_);
    const double qrate = increment_q_rate(rho, rm);
    EXPECT_TRUE(ks_one_sample(qs, [&](double x) { return oracle::exp_cdf(x, qrate); }).pass);
}

TEST(EnvJson, RoundTripsEveryKind)
{
    const std::vector<ModelKind> kinds = {StationaryRho{0.3},    PointToPoint{0.1},   PointToPointRate{kInf},
                                          ZeroDiagonal{0.45},   AlphaBeta{0.2, 0.3}, FullSpaceSquare{},
                                          Tilted{{0.6}, 0.9, 0.25}};
    for (const auto& k : kinds) {
        const auto spec = make(k, 0xfedcba9876543210ULL, 42, 321);
        const auto j = to_json(spec);
        const auto back = environment_from_json(nlohmann::json::parse(j.dump()));
        EXPECT_EQ(to_json(back), j);
        for (std::int64_t i = 0; i < 12; ++i) {
            for (std::int64_t jj = 0; jj <= i; ++jj) EXPECT_EQ(weight_at(back, {i, jj}), weight_at(spec, {i, jj}));
        }
    }
    EXPECT_THROW(environment_from_json(nlohmann::json::parse(R"({"kind":"nope","N":1,"seed":1,"coupling_group":1})")),
                 domain_error);
}
