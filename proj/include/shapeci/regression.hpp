#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "shapeci/linalg.hpp"
#include "shapeci/sieve.hpp"

namespace shapeci {

/// Observations of a scalar running variable x and an outcome y.
struct Dataset {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const noexcept { return x.size(); }
    bool empty() const noexcept { return x.empty(); }

    /// Throws DomainError on length mismatch or non-finite entries.
    void validate() const;
};

/// Observations with lo <= x <= hi, in original order.
Dataset window(const Dataset& data, double lo, double hi);

/// Sieve least-squares fit. Sample means divide by n.
struct SieveFit {
    SieveBasis basis;
    Matrix gram;      ///< E_n[p p^T]
    Vector moment;    ///< E_n[p y]
    Vector beta_hat;  ///< gram^{-1} moment
    Matrix omega_hat; ///< n x k, row i = p(x_i) (y_i - p(x_i)^T beta_hat)
    Matrix omega_cov; ///< E_n[omega omega^T]

    std::size_t n() const noexcept { return omega_hat.rows(); }
    std::size_t k() const noexcept { return gram.rows(); }
};

/// Fits y on the sieve. Requires n >= k and every x inside the basis
/// window. Throws NearSingular (with per-side counts) when the Gram matrix
/// is degenerate.
SieveFit fit(const Dataset& data, const SieveBasis& basis);

/// E_n[p (y - p^T beta)] = moment - gram * beta; zero at beta_hat.
Vector score_mean(const SieveFit& fit, std::span<const double> beta);

/// a0 gram^{-1} (r x k): maps sample scores to the functional scale.
Matrix functional_loading(const SieveFit& fit, const Matrix& a0);

/// Sandwich variance a0 Q^{-1} Omega Q^{-1} a0^T (r x r). May be singular
/// (e.g. an exact fit gives the zero matrix); consumers that studentize by
/// it raise NearSingular.
Matrix project_variance(const SieveFit& fit, const Matrix& a0);

} // namespace shapeci
