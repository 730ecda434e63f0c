#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "shapeci/linalg.hpp"
#include "shapeci/regression.hpp"

namespace shapeci {

struct BootstrapConfig {
    std::size_t m_draws = 500;
    double alpha = 0.05;
    std::uint64_t seed = 1;

    void validate() const;
};

struct CriticalValue {
    double cv = 0.0;
    std::vector<double> draws; ///< sup statistic per replicate, in replicate order
};

/// Writes the multiplier signs for replicate m into `signs` (length n).
using SignSource = std::function<void(std::size_t replicate, std::span<double> signs)>;

/// Default sign stream: replicate m draws from mt19937_64 seeded with
/// seed ^ m, so replicates are independent of evaluation order.
SignSource rademacher_source(std::uint64_t seed);

/// Upper empirical quantile: the ceil((1 - alpha) M)-th smallest draw.
double upper_quantile(std::span<const double> draws, double alpha);

/// Critical value of || Omega^{-1/2} E_n[eta omega] ||_inf.
/// Throws NearSingular when Omega is not positive definite.
CriticalValue cv_general(const SieveFit& fit, const BootstrapConfig& cfg, const SignSource& signs = {});

/// Critical value of || V^{-1/2} a0 Q^{-1} E_n[eta omega] ||_inf, with V
/// the sandwich variance of a0. Throws NearSingular when V is singular.
CriticalValue cv_projected(const SieveFit& fit, const Matrix& a0, const BootstrapConfig& cfg,
                           const SignSource& signs = {});

} // namespace shapeci
