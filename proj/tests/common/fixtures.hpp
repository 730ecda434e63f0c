#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "shapeci/regression.hpp"

namespace fixture {

/// Uniform x on [lo, hi] with a smooth kinked mean and normal noise.
inline shapeci::Dataset kinked_data(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0,
                                    double noise = 0.3) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> ux(lo, hi);
    std::normal_distribution<double> z(0.0, noise);
    shapeci::Dataset d;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(eng);
        const double mean = (x < 0.0 ? 0.15 * x : -0.1 * x) + 0.2 * std::sin(x);
        d.x.push_back(x);
        d.y.push_back(mean + z(eng));
    }
    return d;
}

} // namespace fixture
