#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "env.hpp"
#include "lattice.hpp"
#include "passage.hpp"

namespace hslpp {

struct Geodesic {
    std::vector<LatticePoint> points; // start to end, one point per anti-diagonal level
    double value = 0.0;

    const LatticePoint& front() const { return points.front(); }
    const LatticePoint& back() const { return points.back(); }

    // Point on anti-diagonal level k, if the path reaches it.
    std::optional<LatticePoint> at_level(std::int64_t k) const
    {
        if (points.empty()) return std::nullopt;
        const std::int64_t off = k - points.front().level();
        if (off < 0 || off >= static_cast<std::int64_t>(points.size())) return std::nullopt;
        return points[static_cast<std::size_t>(off)];
    }
};

inline Geodesic backtrack(const PassageTable& table, const LatticePoint& b)
{
    if (!table.contains(b)) throw domain_error("backtrack: " + to_string(b) + " is outside the table");
    if (!table.reachable(b)) throw no_path_error("backtrack: " + to_string(b) + " is unreachable");
    Geodesic g;
    g.value = table.value(b);
    const LatticePoint a = table.origin();
    g.points.resize(static_cast<std::size_t>(b.level() - a.level() + 1));
    LatticePoint p = b;
    for (std::size_t k = g.points.size(); k-- > 0;) {
        g.points[k] = p;
        if (k == 0) break;
        if (table.from_left(p)) {
            --p.i;
        } else {
            --p.j;
        }
    }
    return g;
}

// Sum of weights along the path, start excluded.
template <WeightSource S>
double path_weight(const S& src, const Geodesic& g)
{
    double s = 0.0;
    for (std::size_t k = 1; k < g.points.size(); ++k) s += src.weight(g.points[k]);
    return s;
}

inline bool is_up_right_path(const Geodesic& g, Domain dom = Domain::HalfSpace)
{
    for (std::size_t k = 0; k < g.points.size(); ++k) {
        const auto& p = g.points[k];
        if (dom == Domain::HalfSpace ? !in_half_space(p) : !in_quadrant(p)) return false;
        if (k == 0) continue;
        const auto& q = g.points[k - 1];
        const bool step = (p.i == q.i + 1 && p.j == q.j) || (p.i == q.i && p.j == q.j + 1);
        if (!step) return false;
    }
    return true;
}

// g1 <= g2: on every common anti-diagonal level the point of g2 lies weakly
// to the right of (equivalently below) the point of g1.
inline bool geodesic_ordering(const Geodesic& g1, const Geodesic& g2)
{
    if (g1.points.empty() || g2.points.empty()) return true;
    const std::int64_t lo = std::max(g1.front().level(), g2.front().level());
    const std::int64_t hi = std::min(g1.back().level(), g2.back().level());
    for (std::int64_t k = lo; k <= hi; ++k) {
        if (g1.at_level(k)->i > g2.at_level(k)->i) return false;
    }
    return true;
}

// Shared points of two paths, in increasing level.
inline std::vector<LatticePoint> intersection(const Geodesic& g1, const Geodesic& g2)
{
    std::vector<LatticePoint> out;
    if (g1.points.empty() || g2.points.empty()) return out;
    const std::int64_t lo = std::max(g1.front().level(), g2.front().level());
    const std::int64_t hi = std::min(g1.back().level(), g2.back().level());
    for (std::int64_t k = lo; k <= hi; ++k) {
        const auto p = *g1.at_level(k);
        if (p == *g2.at_level(k)) out.push_back(p);
    }
    return out;
}

inline bool touches_diagonal(const Geodesic& g)
{
    for (const auto& p : g.points) {
        if (on_diagonal(p)) return true;
    }
    return false;
}

struct CrossingReport {
    bool crossed = false;
    std::optional<LatticePoint> last_crossing;
    bool touched_diagonal = false;

    // touched_diagonal implies crossed whenever the endpoints differ.
    bool implication_holds() const { return !touched_diagonal || crossed; }
};

// pi_st ends at q (density rho_minus), pi_pp ends at p, p <= q in the
// endpoint order. Crossing means a shared bulk point.
inline CrossingReport crossing_report(const Geodesic& pi_st, const Geodesic& pi_pp)
{
    CrossingReport r;
    r.touched_diagonal = touches_diagonal(pi_st);
    for (const auto& x : intersection(pi_st, pi_pp)) {
        if (!in_bulk(x)) continue;
        r.crossed = true;
        // L-infinity distance from the origin is i in the half-space.
        if (!r.last_crossing || x.i > r.last_crossing->i || (x.i == r.last_crossing->i && x.j > r.last_crossing->j)) {
            r.last_crossing = x;
        }
    }
    return r;
}

inline CrossingReport crossing_event(const EnvironmentSpec& spec_st, const EnvironmentSpec& spec_pp,
                                     const LatticePoint& p, const LatticePoint& q)
{
    if (spec_st.seed != spec_pp.seed || spec_st.coupling_group != spec_pp.coupling_group) {
        throw misuse_error("crossing_event: the two environments are not coupled");
    }
    if (!precedes(p, q)) throw domain_error("crossing_event: requires p1 <= q1 and p2 >= q2");
    const LatticePoint o{0, 0};
    const auto tab_st = build_table(Environment(spec_st), o, q);
    const auto tab_pp = build_table(Environment(spec_pp), o, p);
    return crossing_report(backtrack(tab_st, q), backtrack(tab_pp, p));
}

// Largest (i - j) / (2N)^{2/3} along the path.
inline double max_excursion(const Geodesic& g, std::int64_t N)
{
    const double scale = std::cbrt(4.0 * static_cast<double>(N) * static_cast<double>(N));
    std::int64_t best = 0;
    for (const auto& p : g.points) best = std::max(best, p.i - p.j);
    return static_cast<double>(best) / scale;
}

inline void write_csv(std::ostream& os, const Geodesic& g)
{
    os << "step,i,j\n";
    for (std::size_t k = 0; k < g.points.size(); ++k) os << k << ',' << g.points[k].i << ',' << g.points[k].j << '\n';
}

} // namespace hslpp
