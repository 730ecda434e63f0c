#include "shapeci/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shapeci/errors.hpp"

namespace shapeci {

namespace {

constexpr double kResidualNoise = 64.0 * std::numeric_limits<double>::epsilon();

} // namespace

void Dataset::validate() const {
    if (x.size() != y.size()) {
        throw DomainError("Dataset: x and y lengths differ");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw DomainError("Dataset: non-finite value at observation " + std::to_string(i + 1));
        }
    }
}

Dataset window(const Dataset& data, double lo, double hi) {
    Dataset out;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.x[i] >= lo && data.x[i] <= hi) {
            out.x.push_back(data.x[i]);
            out.y.push_back(data.y[i]);
        }
    }
    return out;
}

SieveFit fit(const Dataset& data, const SieveBasis& basis) {
    data.validate();
    const std::size_t n = data.size();
    const std::size_t k = basis.dim();
    if (n < k) {
        throw DomainError("fit: need at least k = " + std::to_string(k) + " observations, got " + std::to_string(n));
    }

    Matrix design(n, k);
    std::size_t left = 0;
    for (std::size_t i = 0; i < n; ++i) {
        basis.eval_into(data.x[i], design.row(i));
        if (data.x[i] < basis.kink()) {
            ++left;
        }
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    Matrix gram(k, k);
    Vector moment(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = design.row(i);
        for (std::size_t a = 0; a < k; ++a) {
            if (p[a] == 0.0) {
                continue;
            }
            moment[a] += p[a] * data.y[i];
            for (std::size_t b = a; b < k; ++b) {
                gram(a, b) += p[a] * p[b];
            }
        }
    }
    for (std::size_t a = 0; a < k; ++a) {
        moment[a] *= inv_n;
        for (std::size_t b = a; b < k; ++b) {
            gram(a, b) *= inv_n;
            gram(b, a) = gram(a, b);
        }
    }

    Vector beta;
    try {
        beta = solve_spd(gram, moment);
    } catch (const NearSingular& e) {
        throw NearSingular("fit: Gram matrix is near singular with " + std::to_string(left) + " observations left and " +
                           std::to_string(n - left) + " right of the kink for k = " + std::to_string(k) + " (" +
                           e.what() + ")");
    }

    Matrix omega(n, k);
    Matrix omega_cov(k, k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = design.row(i);
        double fitted = 0.0;
        double magnitude = std::abs(data.y[i]);
        for (std::size_t a = 0; a < k; ++a) {
            fitted += p[a] * beta[a];
            magnitude += std::abs(p[a] * beta[a]);
        }
        double resid = data.y[i] - fitted;
        // Residuals at rounding level are an exact fit.
        if (std::abs(resid) <= kResidualNoise * magnitude) {
            resid = 0.0;
        }
        auto w = omega.row(i);
        for (std::size_t a = 0; a < k; ++a) {
            w[a] = p[a] * resid;
        }
        for (std::size_t a = 0; a < k; ++a) {
            if (w[a] == 0.0) {
                continue;
            }
            for (std::size_t b = a; b < k; ++b) {
                omega_cov(a, b) += w[a] * w[b];
            }
        }
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            omega_cov(a, b) *= inv_n;
            omega_cov(b, a) = omega_cov(a, b);
        }
    }

    return SieveFit{basis, std::move(gram), std::move(moment), std::move(beta), std::move(omega), std::move(omega_cov)};
}

Vector score_mean(const SieveFit& fit, std::span<const double> beta) {
    Vector s = fit.gram * beta;
    for (std::size_t a = 0; a < s.size(); ++a) {
        s[a] = fit.moment[a] - s[a];
    }
    return s;
}

Matrix functional_loading(const SieveFit& fit, const Matrix& a0) {
    if (a0.cols() != fit.k()) {
        throw DomainError("functional_loading: a0 must have k columns");
    }
    // Q symmetric, so a0 Q^{-1} = (Q^{-1} a0^T)^T.
    return solve_spd(fit.gram, a0.transpose()).transpose();
}

Matrix project_variance(const SieveFit& fit, const Matrix& a0) {
    if (a0.rows() == 0) {
        throw DomainError("project_variance: a0 must have at least one row");
    }
    const Matrix load = functional_loading(fit, a0);
    return symmetrized(load * fit.omega_cov * load.transpose());
}

} // namespace shapeci
