#include <doctest.h>

#include <cmath>
#include <map>

#include "bootstrap_oracle.hpp"
#include "fixtures.hpp"
#include "shapeci/bootstrap.hpp"
#include "shapeci/errors.hpp"
#include "shapeci/rng.hpp"

using namespace shapeci;

namespace {

// A fit with hand-chosen scores; only gram, omega_hat and omega_cov matter
// to the bootstrap.
SieveFit crafted_fit(const Matrix& omega_hat, const Matrix& gram) {
    const std::size_t n = omega_hat.rows();
    const std::size_t k = omega_hat.cols();
    Matrix cov(k, k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
                cov(a, b) += omega_hat(i, a) * omega_hat(i, b) / static_cast<double>(n);
            }
        }
    }
    return SieveFit{SieveBasis(0.0, 1.0, 2), gram, Vector(k), Vector(k), omega_hat, cov};
}

// Three observations, k = 2: two left of the kink, one right.
SieveFit three_point_fit() {
    const Dataset d{{-0.8, -0.2, 0.5}, {1.0, 2.5, -0.4}};
    return fit(d, SieveBasis(0.0, 1.0, 2));
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

} // namespace

TEST_CASE("rademacher_source uses one engine bit per observation") {
    const auto src = rademacher_source(42);
    std::vector<double> signs(130);
    src(7, signs);
    Engine eng(42 ^ 7);
    const std::uint64_t w0 = eng();
    const std::uint64_t w1 = eng();
    const std::uint64_t w2 = eng();
    for (std::size_t i = 0; i < 130; ++i) {
        const std::uint64_t w = i < 64 ? w0 : (i < 128 ? w1 : w2);
        CHECK(signs[i] == (((w >> (i % 64)) & 1u) ? 1.0 : -1.0));
    }
    // Roughly balanced over many draws.
    std::vector<double> many(100000);
    src(3, many);
    double sum = 0.0;
    for (double s : many) {
        sum += s;
    }
    CHECK(std::abs(sum) < 5.0 * std::sqrt(100000.0));
}

TEST_CASE("upper_quantile uses the ceiling order statistic") {
    std::vector<double> draws(100);
    for (std::size_t i = 0; i < 100; ++i) {
        draws[i] = static_cast<double>(100 - i);
    }
    CHECK(upper_quantile(draws, 0.05) == 95.0);
    CHECK(upper_quantile(draws, 0.10) == 90.0);
    CHECK(upper_quantile(draws, 0.999) == 1.0);
    CHECK(upper_quantile(std::vector<double>{3.5}, 0.05) == 3.5);
    CHECK_THROWS_AS(upper_quantile(std::vector<double>{}, 0.05), DomainError);

    double prev = upper_quantile(draws, 0.01);
    for (double a = 0.02; a < 0.99; a += 0.01) {
        const double q = upper_quantile(draws, a);
        CHECK(q <= prev);
        prev = q;
    }
}

TEST_CASE("a single draw is its own critical value") {
    const SieveFit f = fit(fixture::kinked_data(200, 5), SieveBasis(0.0, 1.0, 4));
    const BootstrapConfig cfg{1, 0.05, 9};
    const auto g = cv_general(f, cfg);
    REQUIRE(g.draws.size() == 1);
    CHECK(g.cv == g.draws[0]);
    const auto p = cv_projected(f, Matrix{{0, 0, 1, -1}}, cfg);
    CHECK(p.cv == p.draws[0]);
}

TEST_CASE("general statistic matches exhaustive enumeration for n = 2") {
    const SieveFit f = crafted_fit(Matrix{{0.7, -0.2}, {0.1, 0.9}}, Matrix::identity(2));
    const auto exhaustive = oracle::enumerate_general(f);
    for (double alpha : {0.05, 0.25, 0.5, 0.8}) {
        const auto cv = cv_general(f, BootstrapConfig{4, alpha, 0}, oracle::enumerating_source());
        for (std::size_t m = 0; m < 4; ++m) {
            CHECK(close(cv.draws[m], exhaustive[m]));
        }
        CHECK(close(cv.cv, oracle::order_statistic_quantile(exhaustive, alpha)));
    }
}

TEST_CASE("projected statistic matches exhaustive enumeration for n = 2 and n = 3") {
    const Matrix a0{{1.0, -0.5}};
    const SieveFit crafted = crafted_fit(Matrix{{0.7, -0.2}, {0.1, 0.9}}, Matrix{{2.0, 0.3}, {0.3, 1.0}});
    const SieveFit real = three_point_fit();
    for (const SieveFit* f : {&crafted, &real}) {
        const auto exhaustive = oracle::enumerate_projected(*f, a0);
        const std::size_t patterns = exhaustive.size();
        for (double alpha : {0.05, 0.2, 0.5}) {
            const auto cv = cv_projected(*f, a0, BootstrapConfig{patterns, alpha, 0}, oracle::enumerating_source());
            for (std::size_t m = 0; m < patterns; ++m) {
                CHECK(close(cv.draws[m], exhaustive[m]));
            }
            CHECK(close(cv.cv, oracle::order_statistic_quantile(exhaustive, alpha)));
        }
    }
}

TEST_CASE("identical score rows give the scaled binomial law") {
    const std::size_t n = 9;
    Matrix rows(n, 1, 0.6);
    // k = 1: the statistic is |mean of signs|.
    const SieveFit f = crafted_fit(rows, Matrix{{1.0}});
    const std::size_t draws = 40000;
    const auto cv = cv_general(f, BootstrapConfig{draws, 0.05, 123});
    std::map<long, std::size_t> counts;
    for (double s : cv.draws) {
        const double scaled = s * static_cast<double>(n);
        const long j = std::lround(scaled);
        CHECK(std::abs(scaled - static_cast<double>(j)) < 1e-9);
        ++counts[j];
    }
    // P(|2B - n| = j) for B ~ Binomial(n, 1/2), j odd.
    auto choose = [](double nn, double kk) { return std::exp(std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1)); };
    for (long j = 1; j <= static_cast<long>(n); j += 2) {
        const double b = (static_cast<double>(n) + static_cast<double>(j)) / 2.0;
        const double p = 2.0 * choose(static_cast<double>(n), b) / std::pow(2.0, static_cast<double>(n));
        const double expected = p * static_cast<double>(draws);
        const double sd = std::sqrt(static_cast<double>(draws) * p * (1 - p));
        CHECK(std::abs(static_cast<double>(counts[j]) - expected) <= 4.0 * sd);
    }

    // Same law through the projected statistic with k = 2.
    Matrix rows2(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        rows2(i, 0) = 0.4;
        rows2(i, 1) = -1.1;
    }
    const SieveFit f2 = crafted_fit(rows2, Matrix{{1.5, 0.2}, {0.2, 0.8}});
    const auto p = cv_projected(f2, Matrix{{1.0, 2.0}}, BootstrapConfig{200, 0.05, 5});
    const auto g = cv_general(f, BootstrapConfig{200, 0.05, 5});
    for (std::size_t m = 0; m < 200; ++m) {
        CHECK(p.draws[m] == doctest::Approx(g.draws[m]).epsilon(1e-12));
    }
}

TEST_CASE("bootstrap is deterministic and sign-symmetric") {
    const Dataset d = fixture::kinked_data(400, 8);
    const SieveBasis basis(0.0, 1.0, 6);
    const SieveFit f = fit(d, basis);
    const BootstrapConfig cfg{300, 0.05, 2024};
    const Matrix a0{{0, 0, 1, -1, 0, 0}};

    const auto g1 = cv_general(f, cfg);
    const auto g2 = cv_general(f, cfg);
    CHECK(g1.draws == g2.draws);
    CHECK(g1.cv == g2.cv);
    const auto p1 = cv_projected(f, a0, cfg);
    CHECK(p1.draws == cv_projected(f, a0, cfg).draws);

    Dataset neg = d;
    for (double& y : neg.y) {
        y = -y;
    }
    const SieveFit fn = fit(neg, basis);
    const auto gn = cv_general(fn, cfg);
    const auto pn = cv_projected(fn, a0, cfg);
    for (std::size_t m = 0; m < cfg.m_draws; ++m) {
        CHECK(gn.draws[m] == doctest::Approx(g1.draws[m]).epsilon(1e-12));
        CHECK(pn.draws[m] == doctest::Approx(p1.draws[m]).epsilon(1e-12));
    }

    // Another seed gives a different stream.
    CHECK(cv_general(f, BootstrapConfig{300, 0.05, 2025}).draws != g1.draws);

    // cv is non-increasing in alpha for the same draws.
    double prev = cv_general(f, BootstrapConfig{300, 0.01, 2024}).cv;
    for (double alpha : {0.05, 0.1, 0.2, 0.5}) {
        const double c = cv_general(f, BootstrapConfig{300, alpha, 2024}).cv;
        CHECK(c <= prev);
        prev = c;
    }
}

TEST_CASE("degenerate variances raise NearSingular") {
    Dataset exact{{-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}, {1, 1, 1, 2, 2, 2}};
    const SieveFit f = fit(exact, SieveBasis(0.0, 1.0, 2));
    CHECK_THROWS_AS(cv_general(f, BootstrapConfig{}), NearSingular);
    CHECK_THROWS_AS(cv_projected(f, Matrix{{1, -1}}, BootstrapConfig{}), NearSingular);
    CHECK_THROWS_AS(BootstrapConfig({0, 0.05, 1}).validate(), DomainError);
    CHECK_THROWS_AS(BootstrapConfig({10, 1.0, 1}).validate(), DomainError);
}
