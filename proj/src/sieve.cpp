#include "shapeci/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shapeci/errors.hpp"

namespace shapeci {

void legendre_table(double t, std::span<double> values, std::span<double> derivs) {
    const std::size_t n = values.size();
    if (n == 0) {
        return;
    }
    values[0] = 1.0;
    derivs[0] = 0.0;
    if (n == 1) {
        return;
    }
    values[1] = t;
    derivs[1] = 1.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double jj = static_cast<double>(j);
        // (j+1) P_{j+1} = (2j+1) t P_j - j P_{j-1}
        values[j + 1] = ((2.0 * jj + 1.0) * t * values[j] - jj * values[j - 1]) / (jj + 1.0);
        // P'_{j+1} = (j+1) P_j + t P'_j
        derivs[j + 1] = (jj + 1.0) * values[j] + t * derivs[j];
    }
}

SieveBasis::SieveBasis(double kink, double half_width, std::size_t k)
    : kink_(kink), half_width_(half_width), k_(k) {
    if (!std::isfinite(kink)) {
        throw DomainError("SieveBasis: kink must be finite");
    }
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw DomainError("SieveBasis: half_width must be positive and finite");
    }
    if (k < 2 || k % 2 != 0) {
        throw DomainError("SieveBasis: k must be even and at least 2, got " + std::to_string(k));
    }
}

double SieveBasis::to_unit(Side side, double x) const noexcept {
    const double a = side == Side::Left ? kink_ - half_width_ : kink_;
    return 2.0 * (x - a) / half_width_ - 1.0;
}

void SieveBasis::check_window(double x) const {
    if (!contains(x)) {
        throw DomainError("SieveBasis: x = " + std::to_string(x) + " lies outside the window [" +
                          std::to_string(lower()) + ", " + std::to_string(upper()) + "]");
    }
}

void SieveBasis::fill(Side side, double t, bool derivative, std::span<double> out) const {
    const std::size_t m = degrees();
    double p[64];
    double dp[64];
    std::vector<double> pv;
    std::vector<double> dpv;
    std::span<double> ps(p, m);
    std::span<double> dps(dp, m);
    if (m > 64) {
        pv.resize(m);
        dpv.resize(m);
        ps = pv;
        dps = dpv;
    }
    legendre_table(t, ps, dps);
    const std::size_t offset = side == Side::Left ? 0 : 1;
    const double chain = 2.0 / half_width_;
    for (std::size_t j = 0; j < m; ++j) {
        const double norm = std::sqrt((2.0 * static_cast<double>(j) + 1.0) / half_width_);
        out[2 * j + offset] = derivative ? norm * chain * dps[j] : norm * ps[j];
    }
}

void SieveBasis::eval_into(double x, std::span<double> out) const {
    check_window(x);
    std::fill(out.begin(), out.end(), 0.0);
    const Side side = x < kink_ ? Side::Left : Side::Right;
    fill(side, to_unit(side, x), false, out);
}

void SieveBasis::eval_deriv_into(double x, std::span<double> out) const {
    check_window(x);
    std::fill(out.begin(), out.end(), 0.0);
    const Side side = x < kink_ ? Side::Left : Side::Right;
    fill(side, to_unit(side, x), true, out);
}

Vector SieveBasis::eval(double x) const {
    Vector out(k_);
    eval_into(x, out);
    return out;
}

Vector SieveBasis::eval_deriv(double x) const {
    Vector out(k_);
    eval_deriv_into(x, out);
    return out;
}

KinkLimits SieveBasis::kink_limits() const {
    KinkLimits lim{Vector(k_), Vector(k_), Vector(k_), Vector(k_)};
    // The kink is the right end (t = 1) of the left half and the left end
    // (t = -1) of the right half.
    fill(Side::Left, 1.0, false, lim.value_left);
    fill(Side::Right, -1.0, false, lim.value_right);
    fill(Side::Left, 1.0, true, lim.deriv_left);
    fill(Side::Right, -1.0, true, lim.deriv_right);
    return lim;
}

} // namespace shapeci
