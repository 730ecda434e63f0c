#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace shapeci {

/// All randomness comes from std::mt19937_64, whose output sequence for a
/// given seed is fixed by the C++ standard. Distributions are implemented
/// here rather than taken from <random>, whose algorithms are unspecified.
using Engine = std::mt19937_64;

/// Uniform on the open interval (0, 1), 53 bits of resolution.
inline double uniform_open01(Engine& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Two independent standard normals by the Box-Muller transform.
std::pair<double, double> standard_normal_pair(Engine& eng);

/// Rademacher signs (+1/-1), one engine bit per entry: entry i uses bit
/// (i mod 64) of the (i/64)-th 64-bit output.
void rademacher_fill(Engine& eng, std::span<double> signs);

/// SplitMix64 finalizer, used to derive well-separated seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

} // namespace shapeci
