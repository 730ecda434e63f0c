#pragma once

#include <cstddef>
#include <span>

#include "shapeci/linalg.hpp"

namespace shapeci {

/// One-sided limits at the kink of every basis entry and its derivative.
struct KinkLimits {
    Vector value_left;
    Vector value_right;
    Vector deriv_left;
    Vector deriv_right;
};

/// Split orthonormal shifted-Legendre system around a kink x0.
///
/// The window [x0 - h, x0 + h] is cut at x0; each half carries the first
/// k/2 orthonormal shifted Legendre polynomials, zero-extended to the other
/// half. Entries are interleaved: index 2j is the degree-j left function and
/// 2j+1 the degree-j right function.
///
/// A point exactly at x0 belongs to the right half: left entries evaluate to
/// zero there. Use kink_limits() for one-sided values at x0.
class SieveBasis {
public:
    SieveBasis(double kink, double half_width, std::size_t k);

    double kink() const noexcept { return kink_; }
    double half_width() const noexcept { return half_width_; }
    std::size_t dim() const noexcept { return k_; }
    std::size_t degrees() const noexcept { return k_ / 2; }

    double lower() const noexcept { return kink_ - half_width_; }
    double upper() const noexcept { return kink_ + half_width_; }
    bool contains(double x) const noexcept { return x >= lower() && x <= upper(); }

    Vector eval(double x) const;
    Vector eval_deriv(double x) const;

    /// Allocation-free variants; `out.size()` must equal dim().
    void eval_into(double x, std::span<double> out) const;
    void eval_deriv_into(double x, std::span<double> out) const;

    KinkLimits kink_limits() const;

private:
    enum class Side { Left, Right };

    void fill(Side side, double t, bool derivative, std::span<double> out) const;
    double to_unit(Side side, double x) const noexcept;
    void check_window(double x) const;

    double kink_;
    double half_width_;
    std::size_t k_;
};

/// Legendre polynomial P_j(t) and its derivative, for j = 0..values.size()-1.
void legendre_table(double t, std::span<double> values, std::span<double> derivs);

} // namespace shapeci
