#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hslpp {

// Thrown when an operation is called outside its documented domain.
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Thrown when two objects that must share randomness do not.
class misuse_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct LatticePoint {
    std::int64_t i = 0;
    std::int64_t j = 0;

    friend constexpr bool operator==(const LatticePoint&, const LatticePoint&) = default;
    friend constexpr auto operator<=>(const LatticePoint&, const LatticePoint&) = default;

    constexpr std::int64_t level() const { return i + j; }
};

inline std::ostream& operator<<(std::ostream& os, const LatticePoint& p)
{
    return os << '(' << p.i << ',' << p.j << ')';
}

inline std::string to_string(const LatticePoint& p)
{
    return "(" + std::to_string(p.i) + "," + std::to_string(p.j) + ")";
}

constexpr bool in_quadrant(const LatticePoint& p) { return p.i >= 0 && p.j >= 0; }
constexpr bool in_half_space(const LatticePoint& p) { return p.j >= 0 && p.j <= p.i; }

// a <= b in both coordinates: b is reachable from a by an up-right path.
constexpr bool weakly_below_left(const LatticePoint& a, const LatticePoint& b)
{
    return a.i <= b.i && a.j <= b.j;
}

// The order used for endpoint pairs: p1 <= q1 and p2 >= q2.
constexpr bool precedes(const LatticePoint& p, const LatticePoint& q)
{
    return p.i <= q.i && p.j >= q.j;
}

enum class RegionTag { Origin, Diagonal, BottomRow, Bulk };

inline const char* to_string(RegionTag t)
{
    switch (t) {
    case RegionTag::Origin: return "Origin";
    case RegionTag::Diagonal: return "Diagonal";
    case RegionTag::BottomRow: return "BottomRow";
    case RegionTag::Bulk: return "Bulk";
    }
    return "?";
}

inline RegionTag classify_region(const LatticePoint& p)
{
    if (!in_half_space(p)) {
        throw domain_error("classify_region: " + to_string(p) + " is outside the half-space");
    }
    if (p.i == 0) return RegionTag::Origin;
    if (p.i == p.j) return RegionTag::Diagonal;
    if (p.j == 0) return RegionTag::BottomRow;
    return RegionTag::Bulk;
}

constexpr bool on_diagonal(const LatticePoint& p) { return p.i == p.j && p.j >= 1; }
constexpr bool in_bulk(const LatticePoint& p) { return p.j > 0 && p.j < p.i; }

} // namespace hslpp
