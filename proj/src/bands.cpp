#include "shapeci/bands.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "shapeci/errors.hpp"

namespace shapeci {

void ConstraintSystem::append(const ConstraintSystem& other) {
    g.append_rows(other.g);
    h.insert(h.end(), other.h.begin(), other.h.end());
}

ConstraintSystem sampling_constraints_general(const SieveFit& fit, double cv) {
    if (!(cv >= 0.0)) {
        throw DomainError("sampling_constraints_general: cv must be non-negative");
    }
    Matrix root;
    try {
        root = inv_sqrt_sym(fit.omega_cov);
    } catch (const NearSingular& e) {
        throw NearSingular(std::string("sampling_constraints_general: score covariance is singular (") + e.what() + ")");
    }
    const Matrix sq = root * fit.gram;
    const Vector sm = root * fit.moment;
    const std::size_t k = fit.k();

    ConstraintSystem out{Matrix(2 * k, k), Vector(2 * k)};
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t j = 0; j < k; ++j) {
            out.g(a, j) = -sq(a, j);
            out.g(k + a, j) = sq(a, j);
        }
        out.h[a] = cv - sm[a];
        out.h[k + a] = cv + sm[a];
    }
    return out;
}

ConstraintSystem sampling_constraints_projected(const SieveFit& fit, const Matrix& a0, double cv) {
    if (!(cv >= 0.0)) {
        throw DomainError("sampling_constraints_projected: cv must be non-negative");
    }
    Matrix root;
    try {
        root = inv_sqrt_sym(project_variance(fit, a0));
    } catch (const NearSingular& e) {
        throw NearSingular(std::string("sampling_constraints_projected: functional variance is singular (") + e.what() +
                           ")");
    }
    const Matrix b1 = root * a0;
    const Vector b0 = b1 * fit.beta_hat;
    const std::size_t r = a0.rows();
    const std::size_t k = a0.cols();

    ConstraintSystem out{Matrix(2 * r, k), Vector(2 * r)};
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t j = 0; j < k; ++j) {
            out.g(a, j) = b1(a, j);
            out.g(r + a, j) = -b1(a, j);
        }
        out.h[a] = b0[a] + cv;
        out.h[r + a] = cv - b0[a];
    }
    return out;
}

ShapeConstraints rkd_shape_constraints(const SieveBasis& basis, std::size_t n_grid, double delta1) {
    if (n_grid < 1) {
        throw DomainError("rkd_shape_constraints: n_grid must be at least 1");
    }
    const std::size_t k = basis.dim();
    const KinkLimits lim = basis.kink_limits();
    ShapeConstraints out{Matrix(2 + n_grid, k), Vector(2 + n_grid, delta1)};
    for (std::size_t j = 0; j < k; ++j) {
        const double jump = lim.value_right[j] - lim.value_left[j];
        out.b2(0, j) = jump;
        out.b2(1, j) = -jump;
    }
    const double step = basis.half_width() / static_cast<double>(n_grid + 1);
    for (std::size_t i = 0; i < n_grid; ++i) {
        const double xi = basis.kink() + step * static_cast<double>(i + 1);
        basis.eval_deriv_into(xi, out.b2.row(2 + i));
    }
    return out;
}

namespace {

void mark_binding(const ShapeConstraints& shape, std::span<const double> beta, std::vector<bool>& binding) {
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (std::abs(dot(shape.b2.row(i), beta) - shape.delta1[i]) <= kBindingTol) {
            binding[i] = true;
        }
    }
}

} // namespace

ConfidenceInterval interval_over(std::span<const double> objective, double delta0, const ConstraintSystem& sampling,
                                 const ShapeConstraints& shape) {
    const std::size_t k = objective.size();
    if (sampling.g.cols() != k || (!shape.empty() && shape.b2.cols() != k)) {
        throw DomainError("interval_over: constraint column count differs from objective length");
    }
    if (shape.b2.rows() != shape.delta1.size()) {
        throw DomainError("interval_over: shape rows and delta1 lengths differ");
    }

    LpProblem lp;
    lp.c.assign(objective.begin(), objective.end());
    lp.g = sampling.g;
    lp.h = sampling.h;
    lp.g.append_rows(shape.b2);
    lp.h.insert(lp.h.end(), shape.delta1.begin(), shape.delta1.end());

    ConfidenceInterval ci;
    ci.binding.assign(shape.size(), false);

    lp.sense = Sense::Minimize;
    const LpSolution lo = solve(lp);
    if (lo.status == LpStatus::Infeasible) {
        ci.status = LpStatus::Infeasible;
        ci.infeasibility = lo.infeasibility;
        ci.lower = std::numeric_limits<double>::quiet_NaN();
        ci.upper = std::numeric_limits<double>::quiet_NaN();
        return ci;
    }
    lp.sense = Sense::Maximize;
    const LpSolution hi = solve(lp);

    constexpr double inf = std::numeric_limits<double>::infinity();
    ci.status = LpStatus::Optimal;
    if (lo.status == LpStatus::Unbounded) {
        ci.status = LpStatus::Unbounded;
        ci.lower = -inf;
    } else {
        ci.lower = lo.objective - delta0;
        ci.beta_lower = lo.beta;
        mark_binding(shape, lo.beta, ci.binding);
    }
    if (hi.status == LpStatus::Unbounded) {
        ci.status = LpStatus::Unbounded;
        ci.upper = inf;
    } else {
        ci.upper = hi.objective + delta0;
        ci.beta_upper = hi.beta;
        mark_binding(shape, hi.beta, ci.binding);
    }
    return ci;
}

ConfidenceInterval ci_projected(const SieveFit& fit, const Functional& functional, const ShapeConstraints& shape,
                                double cv) {
    if (functional.a0.rows() != 1 || functional.delta0.size() != 1) {
        throw DomainError("ci_projected: functional must be scalar (one a0 row, one delta0)");
    }
    const ConstraintSystem sampling = sampling_constraints_projected(fit, functional.a0, cv);
    return interval_over(functional.a0.row(0), functional.delta0[0], sampling, shape);
}

ConfidenceInterval ci_projected(const SieveFit& fit, const Functional& functional, const ShapeConstraints& shape,
                                const BootstrapConfig& cfg) {
    const CriticalValue cv = cv_projected(fit, functional.a0, cfg);
    return ci_projected(fit, functional, shape, cv.cv);
}

ConfidenceBand band_general(const SieveFit& fit, std::span<const double> grid, double delta0,
                            const ShapeConstraints& shape, double cv) {
    const ConstraintSystem sampling = sampling_constraints_general(fit, cv);
    ConfidenceBand band;
    band.cv = cv;
    band.grid.assign(grid.begin(), grid.end());
    Vector row(fit.k());
    for (double w0 : grid) {
        fit.basis.eval_into(w0, row);
        const ConfidenceInterval ci = interval_over(row, delta0, sampling, shape);
        band.lower.push_back(ci.lower);
        band.upper.push_back(ci.upper);
        band.status.push_back(ci.status);
    }
    return band;
}

ConfidenceBand band_general(const SieveFit& fit, std::span<const double> grid, double delta0,
                            const ShapeConstraints& shape, const BootstrapConfig& cfg) {
    return band_general(fit, grid, delta0, shape, cv_general(fit, cfg).cv);
}

} // namespace shapeci
