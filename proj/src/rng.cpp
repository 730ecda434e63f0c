#include "shapeci/rng.hpp"

#include <cmath>
#include <numbers>

namespace shapeci {

std::pair<double, double> standard_normal_pair(Engine& eng) {
    const double u1 = uniform_open01(eng);
    const double u2 = uniform_open01(eng);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

void rademacher_fill(Engine& eng, std::span<double> signs) {
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < signs.size(); ++i) {
        if (i % 64 == 0) {
            word = eng();
        }
        signs[i] = ((word >> (i % 64)) & 1u) ? 1.0 : -1.0;
    }
}

std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace shapeci
