// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sphgold Authors

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sphgold::detail {

// splitmix64. Used instead of <random> distributions because their output is
// implementation-defined and seeded runs must match across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound).
    std::uint64_t below(std::uint64_t bound)
    {
        __extension__ using u128 = unsigned __int128;
        const u128 wide = static_cast<u128>(next()) * bound;
        return static_cast<std::uint64_t>(wide >> 64);
    }

    /// Uniform in (0, 1].
    double unit() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    double gaussian()
    {
        const double r = std::sqrt(-2.0 * std::log(unit()));
        return r * std::cos(2.0 * std::numbers::pi * unit());
    }

private:
    std::uint64_t state_;
};

/// Independent stream for cell `counter` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter)
{
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (counter + 1)));
    return mix.next();
}

} // namespace sphgold::detail
