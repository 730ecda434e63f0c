#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "shapeci/bootstrap.hpp"
#include "shapeci/linalg.hpp"
#include "shapeci/lp.hpp"
#include "shapeci/regression.hpp"
#include "shapeci/sieve.hpp"

namespace shapeci {

/// Linear inequalities g beta <= h.
struct ConstraintSystem {
    Matrix g;
    Vector h;

    std::size_t size() const noexcept { return h.size(); }
    void append(const ConstraintSystem& other);
};

/// Shape restrictions on the sieve coefficients: b2 beta <= delta1.
/// Zero rows means unrestricted.
struct ShapeConstraints {
    Matrix b2;
    Vector delta1;

    static ShapeConstraints none(std::size_t k) { return {Matrix(0, k), {}}; }
    std::size_t size() const noexcept { return delta1.size(); }
    bool empty() const noexcept { return delta1.empty(); }
};

/// Linear functional rows a0 beta with approximation-error bounds delta0.
struct Functional {
    Matrix a0;
    Vector delta0;
};

struct ConfidenceInterval {
    LpStatus status = LpStatus::Optimal;
    double lower = 0.0;
    double upper = 0.0;
    /// Per shape row: active (|g beta - h| <= 1e-6) at either optimum.
    std::vector<bool> binding;
    /// Phase-1 residual when status is Infeasible.
    double infeasibility = 0.0;
    Vector beta_lower;
    Vector beta_upper;

    double length() const noexcept { return upper - lower; }
    bool contains(double theta) const noexcept {
        return status == LpStatus::Optimal && lower <= theta && theta <= upper;
    }
};

struct ConfidenceBand {
    std::vector<double> grid;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<LpStatus> status;
    double cv = 0.0;
};

inline constexpr double kBindingTol = 1e-6;

/// The sup-norm sampling constraint || Omega^{-1/2} (E_n[p y] - Q beta) ||_inf <= cv
/// as 2k rows: -S Q beta <= cv - S m and S Q beta <= cv + S m, S = Omega^{-1/2}.
ConstraintSystem sampling_constraints_general(const SieveFit& fit, double cv);

/// The studentized functional constraint || V^{-1/2} (a0 beta_hat - a0 beta) ||_inf <= cv
/// as 2r rows: B1 beta <= B0 + cv and -B1 beta <= cv - B0 with
/// B1 = V^{-1/2} a0, B0 = V^{-1/2} a0 beta_hat.
ConstraintSystem sampling_constraints_projected(const SieveFit& fit, const Matrix& a0, double cv);

/// Continuity at the kink (two rows, each with slack delta1) and a
/// non-increasing fit right of the kink, g'(xi) <= delta1 at n_grid equally
/// spaced interior points of (x0, x0 + h).
ShapeConstraints rkd_shape_constraints(const SieveBasis& basis, std::size_t n_grid, double delta1);

/// [min obj.beta - delta0, max obj.beta + delta0] over sampling and shape
/// rows. Unbounded ends become -inf/+inf; infeasibility is reported in
/// `status` with the phase-1 certificate.
ConfidenceInterval interval_over(std::span<const double> objective, double delta0, const ConstraintSystem& sampling,
                                 const ShapeConstraints& shape);

/// Interval for a scalar functional (a0 with one row) using the projected
/// sampling constraint at critical value `cv`.
ConfidenceInterval ci_projected(const SieveFit& fit, const Functional& functional, const ShapeConstraints& shape,
                                double cv);

/// As above with cv from cv_projected.
ConfidenceInterval ci_projected(const SieveFit& fit, const Functional& functional, const ShapeConstraints& shape,
                                const BootstrapConfig& cfg);

/// Point-evaluation band over `grid` under the general sampling constraint.
/// One cv_general value is shared by every grid point.
ConfidenceBand band_general(const SieveFit& fit, std::span<const double> grid, double delta0,
                            const ShapeConstraints& shape, const BootstrapConfig& cfg);

/// As above at a given critical value.
ConfidenceBand band_general(const SieveFit& fit, std::span<const double> grid, double delta0,
                            const ShapeConstraints& shape, double cv);

} // namespace shapeci
