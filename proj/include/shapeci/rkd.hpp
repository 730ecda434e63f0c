#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "shapeci/bands.hpp"
#include "shapeci/regression.hpp"
#include "shapeci/sieve.hpp"

namespace shapeci {

/// Piecewise-linear policy schedule with slopes slope_left / slope_right on
/// either side of `kink`.
struct KinkSchedule {
    double slope_left = 0.0;
    double slope_right = 0.0;
    double kink = 0.0;

    /// T(x) = slope * x below ceiling / slope, ceiling above.
    static KinkSchedule proportional_with_ceiling(double slope, double ceiling);
    static KinkSchedule piecewise(double slope_left, double slope_right, double kink);
};

/// slope_right - slope_left; throws DomainError when zero.
double kink_denominator(const KinkSchedule& schedule);

/// 1 x k row mapping beta to the kink effect: (right derivative limit - left
/// derivative limit) / kink_denominator.
Matrix a0_row(const SieveBasis& basis, const KinkSchedule& schedule);

enum class ShapeMode { None, Rkd };

std::string_view to_string(ShapeMode mode) noexcept;
std::optional<ShapeMode> parse_shape_mode(std::string_view text) noexcept;

struct RkdConfig {
    std::size_t k = 4;
    double half_width = 1.0;
    double alpha = 0.05;
    std::size_t m_draws = 500;
    std::uint64_t seed = 1;
    double delta0 = 0.01;
    double delta1 = 0.01;
    std::size_t n_grid = 99;
    std::vector<ShapeMode> modes{ShapeMode::None, ShapeMode::Rkd};
    /// Skips the bootstrap and uses this critical value (tests, replays).
    std::optional<double> cv_override;

    void validate() const;
};

struct RkdReport {
    ShapeMode mode = ShapeMode::None;
    ConfidenceInterval ci;
    double length = 0.0;
    double cv = 0.0;
    std::size_t n_used = 0;
    double plug_in = 0.0;
    std::size_t k = 0;
};

/// Windows the data to [kink - h, kink + h], fits the sieve, computes the
/// projected critical value once, and solves the interval LPs for every
/// requested shape mode. Component failures are rethrown with the step
/// that failed prefixed to the message.
std::vector<RkdReport> run_rkd(const Dataset& data, const KinkSchedule& schedule, const RkdConfig& cfg);

} // namespace shapeci
