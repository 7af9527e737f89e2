#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "env.hpp"
#include "lattice.hpp"

namespace hslpp {

class no_path_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class capacity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PathConstraint { Unrestricted, MustTouchDiagonal, AvoidDiagonal };

inline const char* to_string(PathConstraint c)
{
    switch (c) {
    case PathConstraint::Unrestricted: return "Unrestricted";
    case PathConstraint::MustTouchDiagonal: return "MustTouchDiagonal";
    case PathConstraint::AvoidDiagonal: return "AvoidDiagonal";
    }
    return "?";
}

template <class S>
concept WeightSource = requires(const S& s, LatticePoint p, std::int64_t d, std::span<double> out) {
    { s.domain() } -> std::same_as<Domain>;
    { s.contains(p) } -> std::convertible_to<bool>;
    { s.weight(p) } -> std::convertible_to<double>;
    s.fill_antidiagonal(d, d, out);
};

// Explicit weights; unlisted sites weigh 0. Used for injected test cases.
class WeightGrid {
public:
    explicit WeightGrid(Domain domain = Domain::HalfSpace) : domain_(domain) {}

    void set(LatticePoint p, double w) { w_[p] = w; }

    Domain domain() const { return domain_; }
    bool contains(const LatticePoint& p) const { return domain_ == Domain::Quadrant ? in_quadrant(p) : in_half_space(p); }
    double weight(const LatticePoint& p) const
    {
        auto it = w_.find(p);
        return it == w_.end() ? 0.0 : it->second;
    }
    void fill_antidiagonal(std::int64_t d, std::int64_t jlo, std::span<double> out) const
    {
        for (std::size_t t = 0; t < out.size(); ++t) {
            const std::int64_t j = jlo + static_cast<std::int64_t>(t);
            out[t] = weight({d - j, j});
        }
    }

private:
    Domain domain_;
    std::map<LatticePoint, double> w_;
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct DiagRange {
    std::int64_t lo;
    std::int64_t hi; // empty when hi < lo
};

// Rows j of the cells p on anti-diagonal d with a <= p <= b in the domain.
inline DiagRange diag_range(Domain dom, const LatticePoint& a, const LatticePoint& b, std::int64_t d)
{
    std::int64_t lo = std::max(a.j, d - b.i);
    std::int64_t hi = std::min(b.j, d - a.i);
    if (dom == Domain::HalfSpace) hi = std::min(hi, d / 2);
    return {lo, hi};
}

template <WeightSource S>
void check_endpoints(const S& src, const LatticePoint& a, const LatticePoint& b)
{
    if (!src.contains(a) || !src.contains(b)) {
        throw domain_error("last passage: endpoints " + to_string(a) + ", " + to_string(b) + " must lie in the domain");
    }
    if (!weakly_below_left(a, b)) {
        throw domain_error("last passage: " + to_string(b) + " is not reachable from " + to_string(a));
    }
}

} // namespace detail

// Anti-diagonal wavefront DP from a towards b. After each anti-diagonal d
// the visitor receives (d, jlo, values) where values[t] = L(a, (d-jlo-t, jlo+t));
// returning false stops the sweep. The start weight is excluded, so L(a, a) = 0.
template <WeightSource S, class Visitor>
void sweep(const S& src, const LatticePoint& a, const LatticePoint& b, PathConstraint constraint, Visitor&& visit)
{
    using detail::kNegInf;
    detail::check_endpoints(src, a, b);
    const Domain dom = src.domain();
    const bool two_layer = constraint == PathConstraint::MustTouchDiagonal;
    const auto width = static_cast<std::size_t>(b.j - a.j + 3);
    // Slot t = j - a.j + 1; slot 0 is a permanent -inf sentinel.
    std::vector<double> prev(width, kNegInf), cur(width, kNegInf), w(width);
    std::vector<double> prev1, cur1;
    if (two_layer) {
        prev1.assign(width, kNegInf);
        cur1.assign(width, kNegInf);
    }

    const std::int64_t d0 = a.level();
    const std::int64_t d1 = b.level();
    for (std::int64_t d = d0; d <= d1; ++d) {
        const auto r = detail::diag_range(dom, a, b, d);
        if (r.hi < r.lo) break;
        const auto n = static_cast<std::size_t>(r.hi - r.lo + 1);
        const auto s0 = static_cast<std::size_t>(r.lo - a.j + 1);
        src.fill_antidiagonal(d, r.lo, std::span<double>(w.data(), n));

        double* c = cur.data() + s0;
        const double* pl = prev.data() + s0;     // left neighbour (i-1, j)
        const double* pb = prev.data() + s0 - 1; // lower neighbour (i, j-1)
        if (d == d0) {
            c[0] = 0.0;
        } else {
            for (std::size_t t = 0; t < n; ++t) {
                const double l = pl[t];
                const double lb = pb[t];
                c[t] = w[t] + (l > lb ? l : lb);
            }
        }
        const bool diag_here = d % 2 == 0 && d > 0 && d / 2 >= r.lo && d / 2 <= r.hi;
        const std::size_t td = diag_here ? static_cast<std::size_t>(d / 2 - r.lo) : 0;

        if (two_layer) {
            double* c1 = cur1.data() + s0;
            const double* ql = prev1.data() + s0;
            const double* qb = prev1.data() + s0 - 1;
            if (d == d0) {
                c1[0] = kNegInf;
            } else {
                for (std::size_t t = 0; t < n; ++t) {
                    const double l = ql[t];
                    const double lb = qb[t];
                    c1[t] = w[t] + (l > lb ? l : lb);
                }
            }
            if (diag_here) {
                // Reaching a diagonal site moves every path into the touched layer.
                c1[td] = std::max(c1[td], c[td]);
                c[td] = kNegInf;
            }
            cur1[s0 - 1] = kNegInf;
            cur1[s0 + n] = kNegInf;
        } else if (constraint == PathConstraint::AvoidDiagonal && diag_here) {
            c[td] = kNegInf;
        }
        cur[s0 - 1] = kNegInf;
        cur[s0 + n] = kNegInf;

        bool go_on;
        if (two_layer) {
            go_on = visit(d, r.lo, std::span<const double>(cur1.data() + s0, n));
            std::swap(prev1, cur1);
        } else {
            go_on = visit(d, r.lo, std::span<const double>(cur.data() + s0, n));
        }
        std::swap(prev, cur);
        if (!go_on) break;
    }
}

template <WeightSource S>
std::optional<double> try_last_passage(const S& src, const LatticePoint& a, const LatticePoint& b,
                                       PathConstraint constraint = PathConstraint::Unrestricted)
{
    double result = detail::kNegInf;
    sweep(src, a, b, constraint, [&](std::int64_t d, std::int64_t jlo, std::span<const double> v) {
        if (d == b.level()) {
            const auto t = b.j - jlo;
            if (t >= 0 && t < static_cast<std::int64_t>(v.size())) result = v[static_cast<std::size_t>(t)];
        }
        return true;
    });
    if (result == detail::kNegInf) return std::nullopt;
    return result;
}

template <WeightSource S>
double last_passage(const S& src, const LatticePoint& a, const LatticePoint& b,
                    PathConstraint constraint = PathConstraint::Unrestricted)
{
    auto v = try_last_passage(src, a, b, constraint);
    if (!v) {
        throw no_path_error("no admissible path from " + to_string(a) + " to " + to_string(b) + " under " +
                            to_string(constraint));
    }
    return *v;
}

inline double last_passage(const EnvironmentSpec& spec, const LatticePoint& a, const LatticePoint& b,
                           PathConstraint constraint = PathConstraint::Unrestricted)
{
    return last_passage(Environment(spec), a, b, constraint);
}

// L(a, p) at several endpoints from one sweep over their bounding box.
template <WeightSource S>
std::vector<double> last_passage_many(const S& src, const LatticePoint& a, std::span<const LatticePoint> ends,
                                      PathConstraint constraint = PathConstraint::Unrestricted)
{
    std::vector<double> out(ends.size(), detail::kNegInf);
    if (ends.empty()) return out;
    LatticePoint box = a;
    std::int64_t top = a.level();
    for (const auto& e : ends) {
        if (!weakly_below_left(a, e)) throw domain_error("last_passage_many: endpoint " + to_string(e) + " not reachable");
        box.i = std::max(box.i, e.i);
        box.j = std::max(box.j, e.j);
        top = std::max(top, e.level());
    }
    sweep(src, a, box, constraint, [&](std::int64_t d, std::int64_t jlo, std::span<const double> v) {
        for (std::size_t k = 0; k < ends.size(); ++k) {
            if (ends[k].level() != d) continue;
            const auto t = ends[k].j - jlo;
            if (t >= 0 && t < static_cast<std::int64_t>(v.size())) out[k] = v[static_cast<std::size_t>(t)];
        }
        return d < top;
    });
    return out;
}

struct TableOptions {
    std::size_t max_cells = std::size_t{1} << 27;
};

class PassageTable;

template <WeightSource S>
PassageTable build_table(const S& src, const LatticePoint& a, const LatticePoint& b,
                         PathConstraint constraint = PathConstraint::Unrestricted, TableOptions opts = {});

// Values and predecessor bits for every cell a <= p <= b of the domain,
// stored anti-diagonal by anti-diagonal.
class PassageTable {
public:
    const LatticePoint& origin() const { return a_; }
    const LatticePoint& extent() const { return b_; }
    Domain domain() const { return dom_; }
    PathConstraint constraint() const { return constraint_; }
    std::size_t cell_count() const { return values_.size(); }

    bool contains(const LatticePoint& p) const { return index(p).has_value(); }

    double value(const LatticePoint& p) const { return values_[checked(p)]; }

    bool reachable(const LatticePoint& p) const { return value(p) != detail::kNegInf; }

    // True when the maximizing predecessor of p is p - e1 (left).
    bool from_left(const LatticePoint& p) const
    {
        const auto k = checked(p);
        return (pred_[k >> 6] >> (k & 63)) & 1U;
    }

    // Debug dump: int64 header (N, origin i/j, extent i/j, cell count),
    // then the cells in anti-diagonal order as doubles.
    void dump_binary(const std::string& path, std::int64_t N) const
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + path);
        const std::int64_t header[6] = {N, a_.i, a_.j, b_.i, b_.j, static_cast<std::int64_t>(values_.size())};
        f.write(reinterpret_cast<const char*>(header), sizeof header);
        f.write(reinterpret_cast<const char*>(values_.data()),
                static_cast<std::streamsize>(values_.size() * sizeof(double)));
    }

    template <WeightSource S>
    friend PassageTable build_table(const S&, const LatticePoint&, const LatticePoint&, PathConstraint, TableOptions);

private:
    std::optional<std::size_t> index(const LatticePoint& p) const
    {
        const std::int64_t d = p.level();
        if (d < a_.level() || d > b_.level()) return std::nullopt;
        const auto k = static_cast<std::size_t>(d - a_.level());
        if (k >= offset_.size()) return std::nullopt;
        if (p.j < lo_[k] || p.j > hi_[k]) return std::nullopt;
        return offset_[k] + static_cast<std::size_t>(p.j - lo_[k]);
    }
    std::size_t checked(const LatticePoint& p) const
    {
        auto k = index(p);
        if (!k) throw domain_error("passage table does not cover " + to_string(p));
        return *k;
    }

    LatticePoint a_, b_;
    Domain dom_ = Domain::HalfSpace;
    PathConstraint constraint_ = PathConstraint::Unrestricted;
    std::vector<std::size_t> offset_;
    std::vector<std::int64_t> lo_, hi_;
    std::vector<double> values_;
    std::vector<std::uint64_t> pred_;
};

template <WeightSource S>
PassageTable build_table(const S& src, const LatticePoint& a, const LatticePoint& b, PathConstraint constraint,
                         TableOptions opts)
{
    if (constraint == PathConstraint::MustTouchDiagonal) {
        throw domain_error("build_table: MustTouchDiagonal is available for scalar queries only");
    }
    detail::check_endpoints(src, a, b);
    PassageTable tab;
    tab.a_ = a;
    tab.b_ = b;
    tab.dom_ = src.domain();
    tab.constraint_ = constraint;

    std::size_t cells = 0;
    for (std::int64_t d = a.level(); d <= b.level(); ++d) {
        const auto r = detail::diag_range(tab.dom_, a, b, d);
        if (r.hi < r.lo) break;
        tab.offset_.push_back(cells);
        tab.lo_.push_back(r.lo);
        tab.hi_.push_back(r.hi);
        cells += static_cast<std::size_t>(r.hi - r.lo + 1);
        if (cells > opts.max_cells) {
            throw capacity_error("passage table from " + to_string(a) + " to " + to_string(b) + " exceeds " +
                                 std::to_string(opts.max_cells) + " cells");
        }
    }
    tab.values_.resize(cells);
    tab.pred_.assign(cells / 64 + 1, 0);

    std::vector<double> padded;
    std::vector<std::uint8_t> flag;
    sweep(src, a, b, constraint, [&](std::int64_t d, std::int64_t jlo, std::span<const double> v) {
        const auto k = static_cast<std::size_t>(d - a.level());
        const std::size_t off = tab.offset_[k];
        std::copy(v.begin(), v.end(), tab.values_.begin() + static_cast<std::ptrdiff_t>(off));
        if (k == 0) return true;
        // Recover the argmax side from the previous anti-diagonal (below wins
        // ties). Its rows start at plo with plo <= jlo <= plo + 1.
        const std::size_t poff = tab.offset_[k - 1];
        const std::int64_t plo = tab.lo_[k - 1];
        const auto m = static_cast<std::size_t>(tab.hi_[k - 1] - plo + 1);
        padded.assign(m + 2, detail::kNegInf);
        std::copy_n(tab.values_.begin() + static_cast<std::ptrdiff_t>(poff), m, padded.begin() + 1);
        const auto shift = static_cast<std::size_t>(jlo - plo);
        const double* left = padded.data() + shift + 1;
        const double* below = padded.data() + shift;
        flag.resize(v.size());
        for (std::size_t t = 0; t < v.size(); ++t) flag[t] = left[t] > below[t];
        for (std::size_t t = 0; t < v.size(); ++t) {
            const std::size_t idx = off + t;
            tab.pred_[idx >> 6] |= std::uint64_t{flag[t]} << (idx & 63);
        }
        return true;
    });
    return tab;
}

inline PassageTable last_passage_line(const EnvironmentSpec& spec, const LatticePoint& b, TableOptions opts = {})
{
    return build_table(Environment(spec), LatticePoint{0, 0}, b, PathConstraint::Unrestricted, opts);
}

} // namespace hslpp
