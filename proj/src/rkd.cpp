#include "shapeci/rkd.hpp"

#include <cmath>
#include <string>

#include "shapeci/errors.hpp"

namespace shapeci {

KinkSchedule KinkSchedule::proportional_with_ceiling(double slope, double ceiling) {
    if (!(slope != 0.0) || !std::isfinite(slope) || !std::isfinite(ceiling)) {
        throw DomainError("KinkSchedule: slope must be finite and nonzero");
    }
    return KinkSchedule{slope, 0.0, ceiling / slope};
}

KinkSchedule KinkSchedule::piecewise(double slope_left, double slope_right, double kink) {
    return KinkSchedule{slope_left, slope_right, kink};
}

double kink_denominator(const KinkSchedule& schedule) {
    const double d = schedule.slope_right - schedule.slope_left;
    if (d == 0.0 || !std::isfinite(d)) {
        throw DomainError("kink_denominator: the schedule has no kink (equal one-sided slopes)");
    }
    return d;
}

Matrix a0_row(const SieveBasis& basis, const KinkSchedule& schedule) {
    const double denom = kink_denominator(schedule);
    const KinkLimits lim = basis.kink_limits();
    Matrix a0(1, basis.dim());
    for (std::size_t j = 0; j < basis.dim(); ++j) {
        a0(0, j) = (lim.deriv_right[j] - lim.deriv_left[j]) / denom;
    }
    return a0;
}

std::string_view to_string(ShapeMode mode) noexcept {
    return mode == ShapeMode::None ? "none" : "rkd";
}

std::optional<ShapeMode> parse_shape_mode(std::string_view text) noexcept {
    if (text == "none") {
        return ShapeMode::None;
    }
    if (text == "rkd") {
        return ShapeMode::Rkd;
    }
    return std::nullopt;
}

void RkdConfig::validate() const {
    if (k < 2 || k % 2 != 0) {
        throw DomainError("k must be even and at least 2");
    }
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw DomainError("half_width must be positive");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie in (0, 1)");
    }
    if (m_draws < 1) {
        throw DomainError("m_draws must be at least 1");
    }
    if (!(delta0 >= 0.0) || !(delta1 >= 0.0) || !std::isfinite(delta0) || !std::isfinite(delta1)) {
        throw DomainError("delta0 and delta1 must be finite and non-negative");
    }
    if (n_grid < 1) {
        throw DomainError("n_grid must be at least 1");
    }
    if (modes.empty()) {
        throw DomainError("at least one shape mode is required");
    }
    if (cv_override && !(*cv_override >= 0.0)) {
        throw DomainError("cv override must be non-negative");
    }
}

namespace {

template <class F>
auto step(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const NearSingular& e) {
        throw NearSingular(std::string(name) + ": " + e.what());
    } catch (const IterationLimit& e) {
        throw IterationLimit(std::string(name) + ": " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(std::string(name) + ": " + e.what());
    }
}

} // namespace

std::vector<RkdReport> run_rkd(const Dataset& data, const KinkSchedule& schedule, const RkdConfig& cfg) {
    step("config", [&] { cfg.validate(); });
    const SieveBasis basis = step("basis", [&] { return SieveBasis(schedule.kink, cfg.half_width, cfg.k); });
    const Dataset local = window(data, basis.lower(), basis.upper());
    if (local.empty()) {
        throw DomainError("window: no observations within [" + std::to_string(basis.lower()) + ", " +
                          std::to_string(basis.upper()) + "]");
    }

    const SieveFit fitted = step("fit", [&] { return fit(local, basis); });
    const Matrix a0 = step("schedule", [&] { return a0_row(basis, schedule); });
    const double plug_in = dot(a0.row(0), fitted.beta_hat);

    double cv = 0.0;
    if (cfg.cv_override) {
        cv = *cfg.cv_override;
    } else {
        const BootstrapConfig boot{cfg.m_draws, cfg.alpha, cfg.seed};
        cv = step("bootstrap", [&] { return cv_projected(fitted, a0, boot).cv; });
    }

    const ConstraintSystem sampling =
        step("sampling constraints", [&] { return sampling_constraints_projected(fitted, a0, cv); });

    std::vector<RkdReport> reports;
    for (ShapeMode mode : cfg.modes) {
        const ShapeConstraints shape = mode == ShapeMode::Rkd
                                           ? rkd_shape_constraints(basis, cfg.n_grid, cfg.delta1)
                                           : ShapeConstraints::none(basis.dim());
        RkdReport rep;
        rep.mode = mode;
        rep.ci = step("linear programs", [&] { return interval_over(a0.row(0), cfg.delta0, sampling, shape); });
        rep.length = rep.ci.length();
        rep.cv = cv;
        rep.n_used = local.size();
        rep.plug_in = plug_in;
        rep.k = cfg.k;
        reports.push_back(std::move(rep));
    }
    return reports;
}

} // namespace shapeci
