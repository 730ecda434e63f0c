#include "shapeci/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shapeci/errors.hpp"
#include "shapeci/rng.hpp"

namespace shapeci {

void BootstrapConfig::validate() const {
    if (m_draws < 1) {
        throw DomainError("bootstrap: m_draws must be at least 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("bootstrap: alpha must lie in (0, 1)");
    }
}

SignSource rademacher_source(std::uint64_t seed) {
    return [seed](std::size_t replicate, std::span<double> signs) {
        Engine eng(seed ^ static_cast<std::uint64_t>(replicate));
        rademacher_fill(eng, signs);
    };
}

double upper_quantile(std::span<const double> draws, double alpha) {
    if (draws.empty()) {
        throw DomainError("upper_quantile: no draws");
    }
    std::vector<double> sorted(draws.begin(), draws.end());
    std::sort(sorted.begin(), sorted.end());
    const double m = static_cast<double>(sorted.size());
    // Nudge down before ceil so that e.g. 0.95 * 100 lands on 95, not 96.
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * m - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

namespace {

// Shared driver: `scores` is n x r (one loading per observation), `studentize`
// is r x r. Each replicate is || studentize * (1/n) sum_i eta_i scores_i ||_inf.
CriticalValue run_replicates(const Matrix& scores, const Matrix& studentize, const BootstrapConfig& cfg,
                             const SignSource& source) {
    cfg.validate();
    const std::size_t n = scores.rows();
    const std::size_t r = scores.cols();
    const SignSource signs_for = source ? source : rademacher_source(cfg.seed);
    const double inv_n = 1.0 / static_cast<double>(n);

    CriticalValue out;
    out.draws.resize(cfg.m_draws);
    std::vector<double> eta(n);
    Vector mean(r);
    for (std::size_t m = 0; m < cfg.m_draws; ++m) {
        signs_for(m, eta);
        std::fill(mean.begin(), mean.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto s = scores.row(i);
            for (std::size_t a = 0; a < r; ++a) {
                mean[a] += eta[i] * s[a];
            }
        }
        for (double& v : mean) {
            v *= inv_n;
        }
        out.draws[m] = norm_inf(studentize * mean);
    }
    out.cv = upper_quantile(out.draws, cfg.alpha);
    return out;
}

} // namespace

CriticalValue cv_general(const SieveFit& fit, const BootstrapConfig& cfg, const SignSource& signs) {
    Matrix root;
    try {
        root = inv_sqrt_sym(fit.omega_cov);
    } catch (const NearSingular& e) {
        throw NearSingular(std::string("cv_general: score covariance is singular (") + e.what() + ")");
    }
    return run_replicates(fit.omega_hat, root, cfg, signs);
}

CriticalValue cv_projected(const SieveFit& fit, const Matrix& a0, const BootstrapConfig& cfg, const SignSource& signs) {
    const Matrix load = functional_loading(fit, a0);
    Matrix root;
    try {
        root = inv_sqrt_sym(symmetrized(load * fit.omega_cov * load.transpose()));
    } catch (const NearSingular& e) {
        throw NearSingular(std::string("cv_projected: functional variance is singular (") + e.what() + ")");
    }
    // Per-observation loadings a0 Q^{-1} omega_i, computed once.
    Matrix projected(fit.n(), a0.rows());
    for (std::size_t i = 0; i < fit.n(); ++i) {
        const auto w = fit.omega_hat.row(i);
        auto out = projected.row(i);
        for (std::size_t a = 0; a < a0.rows(); ++a) {
            out[a] = dot(load.row(a), w);
        }
    }
    return run_replicates(projected, root, cfg, signs);
}

} // namespace shapeci
