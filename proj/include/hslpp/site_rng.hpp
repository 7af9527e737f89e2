#pragma once

#include <bit>
#include <cstdint>

namespace hslpp {

// SplitMix64 output function (Stafford's Mix13 variant).
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b)
{
    return mix64(mix64(a + 0x9e3779b97f4a7c15ULL) ^ (b + 0x632be59bd9b4e019ULL));
}

// Seed of replica r in an experiment with base seed seed0.
constexpr std::uint64_t replica_seed(std::uint64_t seed0, std::uint64_t r)
{
    return hash_combine(seed0, r ^ 0x5851f42d4c957f2dULL);
}

// Uniform on (0,1]: 53 random bits, never zero, so -log is finite.
inline double unit_open0(std::uint64_t bits)
{
    return static_cast<double>(static_cast<std::int64_t>(bits >> 11) + 1) * 0x1.0p-53;
}

// -ln(unit_open0(bits)), branch-free so that row loops vectorize.
// Uses only correctly rounded operations, so scalar and SIMD paths
// produce identical bits; max relative error is below 5e-16.
inline double neg_log_unit(std::uint64_t bits)
{
    const double u = unit_open0(bits);
    const std::uint64_t b = std::bit_cast<std::uint64_t>(u);
    // Shift the mantissa into [sqrt(1/2), sqrt(2)).
    const std::int64_t k = static_cast<std::int64_t>(b - 0x3fe6a09e667f3bcdULL) >> 52;
    const double m = std::bit_cast<double>(b - (static_cast<std::uint64_t>(k) << 52));
    const double s = (m - 1.0) / (m + 1.0);
    const double t = s * s;
    double p = 1.0 / 19;
    p = p * t + 1.0 / 17;
    p = p * t + 1.0 / 15;
    p = p * t + 1.0 / 13;
    p = p * t + 1.0 / 11;
    p = p * t + 1.0 / 9;
    p = p * t + 1.0 / 7;
    p = p * t + 1.0 / 5;
    p = p * t + 1.0 / 3;
    p = p * t + 1.0;
    const double dk = static_cast<double>(k);
    return -(dk * 0x1.62e42fefa3800p-1 + (dk * 0x1.ef35793c76730p-45 + 2.0 * s * p));
}

// Counter-based bits for lattice site (i, j) under a stream key.
// Coordinates must fit in 32 bits.
constexpr std::uint64_t site_bits(std::uint64_t stream_key, std::uint64_t i, std::uint64_t j)
{
    return mix64(mix64(((i << 32) | j) ^ stream_key) + stream_key);
}

enum class SiteStream : std::uint64_t { U = 0x55, V = 0x56 };

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t coupling_group, SiteStream s)
{
    return hash_combine(hash_combine(seed, coupling_group), static_cast<std::uint64_t>(s));
}

// Sequential generator for replica-level draws (pair selection, walk steps).
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed) : key_(mix64(seed ^ 0xd1b54a32d192ed03ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() { return mix64(mix64(key_ + ++counter_ * 0x9e3779b97f4a7c15ULL) ^ key_); }

    double uniform() { return unit_open0((*this)()); }
    double exponential(double rate) { return neg_log_unit((*this)()) / rate; }

    // Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(((*this)() >> 11) % span);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace hslpp
