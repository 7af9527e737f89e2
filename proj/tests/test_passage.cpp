#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <hslpp/env.hpp>
#include <hslpp/passage.hpp>
#include <hslpp/site_rng.hpp>

#include "oracles.hpp"

using namespace hslpp;

namespace {

WeightGrid five_weight_example()
{
    WeightGrid g;
    g.set({1, 0}, 2);
    g.set({1, 1}, 3);
    g.set({2, 0}, 4);
    g.set({2, 1}, 1);
    g.set({2, 2}, 5);
    return g;
}

// Integer-valued random weights make ties common, exercising the tie rule.
WeightGrid random_grid(std::uint64_t seed, std::int64_t n, bool integer, Domain dom = Domain::HalfSpace)
{
    CounterRng rng(seed);
    WeightGrid g(dom);
    for (std::int64_t i = 0; i <= n; ++i) {
        for (std::int64_t j = 0; j <= n; ++j) {
            if (dom == Domain::HalfSpace && j > i) continue;
            g.set({i, j}, integer ? static_cast<double>(rng.integer(0, 3)) : rng.exponential(1.0));
        }
    }
    return g;
}

} // namespace

TEST(LastPassage, FiveWeightExample)
{
    const auto g = five_weight_example();
    EXPECT_EQ(last_passage(g, {0, 0}, {2, 2}), 12.0);
    const auto bf = oracle::brute_force(g, {0, 0}, {2, 2}, PathConstraint::Unrestricted);
    EXPECT_EQ(*bf.value, 12.0);
}

TEST(LastPassage, TrivialCases)
{
    const auto g = five_weight_example();
    EXPECT_EQ(last_passage(g, {1, 0}, {1, 0}), 0.0);
    EXPECT_EQ(last_passage(g, {2, 2}, {2, 2}), 0.0);
    EXPECT_EQ(last_passage(g, {0, 0}, {1, 0}), 2.0);
    EXPECT_THROW(last_passage(g, {2, 0}, {1, 1}), domain_error);
    EXPECT_THROW(last_passage(g, {0, 0}, {1, 2}), domain_error);
}

TEST(LastPassage, DiagonalConstraints)
{
    const auto g = five_weight_example();
    // Every path to (2,2) ends on the diagonal.
    EXPECT_EQ(last_passage(g, {0, 0}, {2, 2}, PathConstraint::MustTouchDiagonal), 12.0);
    EXPECT_THROW(last_passage(g, {0, 0}, {2, 2}, PathConstraint::AvoidDiagonal), no_path_error);
    EXPECT_FALSE(try_last_passage(g, {0, 0}, {2, 2}, PathConstraint::AvoidDiagonal).has_value());
    // To (2,1): via (1,1) gives 2+3+1 = 6, avoiding gives 2+4+1 = 7.
    EXPECT_EQ(last_passage(g, {0, 0}, {2, 1}, PathConstraint::MustTouchDiagonal), 6.0);
    EXPECT_EQ(last_passage(g, {0, 0}, {2, 1}, PathConstraint::AvoidDiagonal), 7.0);
    EXPECT_EQ(last_passage(g, {0, 0}, {2, 0}, PathConstraint::AvoidDiagonal), 6.0);
    EXPECT_THROW(last_passage(g, {0, 0}, {2, 0}, PathConstraint::MustTouchDiagonal), no_path_error);
}

TEST(LastPassage, MatchesBruteForceOnSmallLattices)
{
    for (std::uint64_t s = 0; s < 150; ++s) {
        const bool integer = s % 2 == 0;
        const auto g = random_grid(s, 7, integer);
        CounterRng rng(1000 + s);
        const std::int64_t bi = rng.integer(0, 7), bj = rng.integer(0, bi);
        const std::int64_t ai = rng.integer(0, bi), aj = rng.integer(0, std::min(ai, bj));
        const LatticePoint a{ai, aj}, b{bi, bj};
        for (auto c : {PathConstraint::Unrestricted, PathConstraint::MustTouchDiagonal, PathConstraint::AvoidDiagonal}) {
            const auto bf = oracle::brute_force(g, a, b, c);
            const auto dp = try_last_passage(g, a, b, c);
            ASSERT_EQ(bf.value.has_value(), dp.has_value()) << a << b << to_string(c);
            if (dp) {
                EXPECT_EQ(*dp, *bf.value) << a << b << to_string(c);
            }
        }
    }
}

TEST(LastPassage, FullSpaceMatchesBruteForce)
{
    for (std::uint64_t s = 0; s < 40; ++s) {
        const auto g = random_grid(s, 6, false, Domain::Quadrant);
        const LatticePoint b{static_cast<std::int64_t>(s % 7), static_cast<std::int64_t>((s / 7) % 7)};
        const auto bf = oracle::brute_force(g, {0, 0}, b, PathConstraint::Unrestricted, true);
        EXPECT_EQ(last_passage(g, {0, 0}, b), *bf.value);
    }
}

TEST(LastPassage, SplitByDiagonalContact)
{
    for (std::uint64_t s = 0; s < 200; ++s) {
        const Environment env(EnvironmentSpec{StationaryRho{0.45}, 30, s, 0});
        const LatticePoint b{30, 12};
        const double all = last_passage(env, {0, 0}, b);
        const auto touch = try_last_passage(env, {0, 0}, b, PathConstraint::MustTouchDiagonal);
        const auto avoid = try_last_passage(env, {0, 0}, b, PathConstraint::AvoidDiagonal);
        EXPECT_EQ(all, std::max(touch.value_or(-kInf), avoid.value_or(-kInf)));
    }
}

TEST(LastPassage, AvoidingDiagonalEqualsZeroDiagonalModel)
{
    // Paths that never visit the diagonal collect the same weights in both
    // models, and a zero diagonal weight cannot help a path that does visit it
    // beyond what a diagonal-free path through (i, i-1) achieves.
    for (std::uint64_t s = 0; s < 200; ++s) {
        const EnvironmentSpec st{StationaryRho{0.4}, 40, s, 0};
        const EnvironmentSpec zd{ZeroDiagonal{0.4}, 40, s, 0};
        for (LatticePoint b : {LatticePoint{40, 10}, LatticePoint{25, 24}, LatticePoint{33, 1}}) {
            EXPECT_EQ(last_passage(st, {0, 0}, b, PathConstraint::AvoidDiagonal), last_passage(zd, {0, 0}, b)) << b;
        }
    }
}

TEST(PassageTable, MatchesScalarAndBruteForce)
{
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto g = random_grid(s, 6, s % 3 == 0);
        const auto tab = build_table(g, {0, 0}, {6, 6});
        for (std::int64_t i = 0; i <= 6; ++i) {
            for (std::int64_t j = 0; j <= i; ++j) {
                const auto bf = oracle::brute_force(g, {0, 0}, {i, j}, PathConstraint::Unrestricted);
                EXPECT_EQ(tab.value({i, j}), *bf.value);
            }
        }
    }
}

TEST(PassageTable, LineConsistency)
{
    const EnvironmentSpec spec{StationaryRho{0.35}, 200, 5, 0};
    const LatticePoint b{200, 150};
    const auto tab = last_passage_line(spec, b);
    EXPECT_EQ(tab.value(b), last_passage(spec, {0, 0}, b));
    const Environment env(spec);
    double prefix = 0.0;
    for (std::int64_t i = 1; i <= 200; ++i) {
        prefix += env.weight({i, 0});
        EXPECT_EQ(tab.value({i, 0}), prefix);
    }
    EXPECT_EQ(tab.origin(), (LatticePoint{0, 0}));
    EXPECT_EQ(tab.extent(), b);
    EXPECT_FALSE(tab.contains({201, 0}));
    EXPECT_FALSE(tab.contains({100, 101}));
}

TEST(PassageTable, ManyEndpointsMatchScalar)
{
    const Environment env(EnvironmentSpec{PointToPoint{0.05}, 100, 9, 0});
    const std::vector<LatticePoint> ends = {{100, 100}, {120, 80}, {50, 50}, {130, 3}};
    const auto v = last_passage_many(env, {0, 0}, ends);
    for (std::size_t k = 0; k < ends.size(); ++k) EXPECT_EQ(v[k], last_passage(env, {0, 0}, ends[k]));
}

TEST(PassageTable, CapacityError)
{
    const EnvironmentSpec spec{StationaryRho{0.5}, 1000, 1, 0};
    EXPECT_THROW(last_passage_line(spec, {1000, 1000}, TableOptions{1000}), capacity_error);
}

TEST(Superadditivity, HoldsOnSampledTriples)
{
    CounterRng rng(77);
    for (std::uint64_t s = 0; s < 60; ++s) {
        const Environment env(EnvironmentSpec{StationaryRho{0.5}, 30, s, 0});
        for (int t = 0; t < 10; ++t) {
            const std::int64_t bi = rng.integer(5, 30), bj = rng.integer(0, bi);
            const std::int64_t ci = rng.integer(0, bi), cj = rng.integer(0, std::min(ci, bj));
            const std::int64_t ai = rng.integer(0, ci), aj = rng.integer(0, std::min(ai, cj));
            const LatticePoint a{ai, aj}, b{bi, bj}, c{ci, cj};
            EXPECT_GE(last_passage(env, a, b) + 1e-9, last_passage(env, a, c) + last_passage(env, c, b));
        }
    }
}

TEST(Concatenation, MaxOverDownRightSeparator)
{
    // The anti-diagonal through level k separates a from b.
    for (std::uint64_t s = 0; s < 40; ++s) {
        const auto g = random_grid(s, 7, false);
        const LatticePoint a{0, 0}, b{7, 5};
        for (std::int64_t k = 1; k < b.level(); ++k) {
            double best = -kInf;
            for (std::int64_t j = 0; j <= k; ++j) {
                const LatticePoint c{k - j, j};
                if (!in_half_space(c) || !weakly_below_left(a, c) || !weakly_below_left(c, b)) continue;
                best = std::max(best, last_passage(g, a, c) + last_passage(g, c, b));
            }
            EXPECT_DOUBLE_EQ(best, last_passage(g, a, b));
        }
    }
}
