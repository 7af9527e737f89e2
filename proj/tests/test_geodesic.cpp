#include <gtest/gtest.h>

#include <sstream>

#include <hslpp/geodesic.hpp>
#include <hslpp/passage.hpp>
#include <hslpp/scaling.hpp>

#include "oracles.hpp"

using namespace hslpp;

namespace {

Geodesic path_of(std::initializer_list<LatticePoint> pts)
{
    Geodesic g;
    g.points = pts;
    return g;
}

} // namespace

TEST(Backtrack, FiveWeightExample)
{
    WeightGrid g;
    g.set({1, 0}, 2);
    g.set({1, 1}, 3);
    g.set({2, 0}, 4);
    g.set({2, 1}, 1);
    g.set({2, 2}, 5);
    const auto tab = build_table(g, {0, 0}, {2, 2});
    const auto geo = backtrack(tab, {2, 2});
    const std::vector<LatticePoint> expect = {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}};
    EXPECT_EQ(geo.points, expect);
    EXPECT_EQ(geo.value, 12.0);
    EXPECT_EQ(oracle::brute_force(g, {0, 0}, {2, 2}, PathConstraint::Unrestricted).argmax, expect);
}

TEST(Backtrack, OriginIsSinglePoint)
{
    WeightGrid g;
    const auto tab = build_table(g, {0, 0}, {3, 1});
    const auto geo = backtrack(tab, {0, 0});
    ASSERT_EQ(geo.points.size(), 1U);
    EXPECT_EQ(geo.value, 0.0);
    EXPECT_THROW(backtrack(tab, {4, 0}), domain_error);
}

TEST(Backtrack, TieGoesBelow)
{
    // All weights equal: every path ties, the below-first rule walks the
    // bottom row and then climbs the last column.
    WeightGrid g;
    for (std::int64_t i = 0; i <= 4; ++i)
        for (std::int64_t j = 0; j <= i; ++j) g.set({i, j}, 1.0);
    const auto geo = backtrack(build_table(g, {0, 0}, {4, 3}), {4, 3});
    const std::vector<LatticePoint> expect = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {4, 1}, {4, 2}, {4, 3}};
    EXPECT_EQ(geo.points, expect);
}

TEST(Backtrack, PathsAreValidAndReproduceTheValue)
{
    for (std::uint64_t s = 0; s < 50; ++s) {
        for (ModelKind k : {ModelKind{StationaryRho{0.4}}, ModelKind{PointToPoint{0.0}}, ModelKind{FullSpaceSquare{}}}) {
            const Environment env(EnvironmentSpec{k, 80, s, 0});
            const LatticePoint b = env.domain() == Domain::Quadrant ? LatticePoint{60, 80} : LatticePoint{80, 55};
            const auto tab = build_table(env, {0, 0}, b);
            const auto geo = backtrack(tab, b);
            EXPECT_TRUE(is_up_right_path(geo, env.domain()));
            EXPECT_EQ(path_weight(env, geo), tab.value(b));
            EXPECT_EQ(geo.value, last_passage(env, {0, 0}, b));
        }
    }
}

TEST(Backtrack, AvoidingTableAvoidsTheDiagonal)
{
    for (std::uint64_t s = 0; s < 30; ++s) {
        const Environment env(EnvironmentSpec{StationaryRho{0.3}, 50, s, 0});
        const LatticePoint b{50, 30};
        const auto geo = backtrack(build_table(env, {0, 0}, b, PathConstraint::AvoidDiagonal), b);
        EXPECT_FALSE(touches_diagonal(geo));
        EXPECT_EQ(path_weight(env, geo), last_passage(env, {0, 0}, b, PathConstraint::AvoidDiagonal));
    }
}

TEST(Ordering, ReflexiveAndConstructed)
{
    const auto low = path_of({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {3, 1}});
    const auto high = path_of({{0, 0}, {1, 0}, {1, 1}, {2, 1}, {3, 1}});
    EXPECT_TRUE(geodesic_ordering(low, low));
    EXPECT_TRUE(geodesic_ordering(high, low));
    EXPECT_FALSE(geodesic_ordering(low, high));
    const auto far = path_of({{5, 0}, {6, 0}, {7, 0}});
    const auto near = path_of({{4, 1}, {4, 2}, {5, 2}});
    EXPECT_TRUE(geodesic_ordering(near, far));
    EXPECT_FALSE(geodesic_ordering(far, near));
}

TEST(Ordering, CoupledStationaryGeodesicsAreOrdered)
{
    int ok = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const LatticePoint b{60, 40};
        const auto lo = backtrack(build_table(Environment({StationaryRho{0.4}, 60, s, 0}), {0, 0}, b), b);
        const auto hi = backtrack(build_table(Environment({StationaryRho{0.6}, 60, s, 0}), {0, 0}, b), b);
        ok += geodesic_ordering(lo, hi);
    }
    EXPECT_EQ(ok, 1000);
}

TEST(Crossing, ReportOnConstructedPaths)
{
    const auto st = path_of({{0, 0}, {1, 0}, {1, 1}, {2, 1}, {3, 1}, {4, 1}});
    const auto pp = path_of({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {3, 1}, {3, 2}});
    const auto r = crossing_report(st, pp);
    EXPECT_TRUE(r.crossed);
    EXPECT_TRUE(r.touched_diagonal);
    ASSERT_TRUE(r.last_crossing.has_value());
    EXPECT_EQ(*r.last_crossing, (LatticePoint{3, 1}));
    EXPECT_TRUE(r.implication_holds());

    const auto apart = path_of({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
    const auto r2 = crossing_report(apart, pp);
    EXPECT_FALSE(r2.crossed);
    EXPECT_FALSE(r2.last_crossing.has_value());
    EXPECT_FALSE(r2.touched_diagonal);
}

TEST(Crossing, RejectsUncoupledSpecs)
{
    const EnvironmentSpec st{StationaryRho{0.4}, 20, 1, 0};
    const EnvironmentSpec pp{PointToPoint{0.0}, 20, 1, 1};
    EXPECT_THROW(crossing_event(st, pp, {20, 20}, {25, 15}), misuse_error);
}

TEST(Crossing, DiagonalTouchImpliesCrossing)
{
    const ScalingFrame f({.N = 100, .delta = 0.0, .kappa = 2.0});
    const auto p = f.q_point(0.0, 1.0), q = f.q_point(0.5, 1.0);
    int touched = 0;
    for (std::uint64_t s = 0; s < 300; ++s) {
        const EnvironmentSpec st{StationaryRho{f.rho_minus()}, 100, s, 0};
        const EnvironmentSpec pp{PointToPoint{f.alpha()}, 100, s, 0};
        const auto r = crossing_event(st, pp, p, q);
        EXPECT_TRUE(r.implication_holds());
        EXPECT_EQ(r.crossed, r.last_crossing.has_value());
        touched += r.touched_diagonal;
    }
    EXPECT_GT(touched, 0);
}

TEST(Crossing, EqualDiagonalEndpoints)
{
    const EnvironmentSpec st{StationaryRho{0.45}, 30, 3, 0};
    const EnvironmentSpec pp{PointToPoint{0.0}, 30, 3, 0};
    const auto r = crossing_event(st, pp, {30, 30}, {30, 30});
    // Both geodesics end with the bulk step (30,29) -> (30,30).
    EXPECT_TRUE(r.crossed);
    EXPECT_TRUE(r.touched_diagonal);
}

TEST(Excursion, Examples)
{
    const std::int64_t N = 100;
    const double scale = std::cbrt(4.0 * N * N);
    Geodesic row;
    for (std::int64_t i = 0; i <= N; ++i) row.points.push_back({i, 0});
    EXPECT_DOUBLE_EQ(max_excursion(row, N), N / scale);
    const auto hug = path_of({{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}});
    EXPECT_DOUBLE_EQ(max_excursion(hug, N), 1.0 / scale);
}

TEST(GeodesicCsv, Format)
{
    std::ostringstream os;
    write_csv(os, path_of({{0, 0}, {1, 0}, {1, 1}}));
    EXPECT_EQ(os.str(), "step,i,j\n0,0,0\n1,1,0\n2,1,1\n");
}
