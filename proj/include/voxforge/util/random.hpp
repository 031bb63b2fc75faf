// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>

// Draws spelled out on top of mt19937_64 so random streams do not depend on
// the standard library's distribution implementations.
namespace voxforge::util {

using Rng = std::mt19937_64;

// 53-bit uniform in [0, 1).
inline double unit_uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

// Uniform in [0, n); n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    const auto i = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n));
    return i < n ? i : n - 1;
}

// Box-Muller, consuming two draws per call.
inline double standard_normal(Rng& rng) {
    const double u1 = 1.0 - unit_uniform(rng);  // (0, 1]
    const double u2 = unit_uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace voxforge::util
