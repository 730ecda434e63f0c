#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's numerical kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "shapeci/linalg.hpp"
#include "shapeci/lp.hpp"

namespace oracle {

using shapeci::Matrix;
using shapeci::Vector;

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& eng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            m(i, j) = u(eng);
        }
    }
    return m;
}

/// A A^T + n I / 4 for a random square A: well conditioned SPD.
inline Matrix random_spd(std::size_t n, std::mt19937_64& eng) {
    const Matrix a = random_matrix(n, n, eng);
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < n; ++l) {
                acc += a(i, l) * a(j, l);
            }
            s(i, j) = acc + (i == j ? 0.25 * static_cast<double>(n) : 0.0);
        }
    }
    return s;
}

/// Gauss-Jordan inverse with partial pivoting; nullopt when singular.
inline std::optional<Matrix> gauss_jordan_inverse(const Matrix& m, double tiny = 1e-13) {
    const std::size_t n = m.rows();
    Matrix a = m;
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) {
                piv = r;
            }
        }
        if (std::abs(a(piv, col)) < tiny) {
            return std::nullopt;
        }
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(a(col, j), a(piv, j));
            std::swap(inv(col, j), inv(piv, j));
        }
        const double d = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) {
                continue;
            }
            const double f = a(r, col);
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

inline Vector mat_vec(const Matrix& m, const Vector& v) {
    Vector out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out[i] += m(i, j) * v[j];
        }
    }
    return out;
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// three-term recurrence.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n) {
    std::vector<double> nodes(n);
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = t;
            for (std::size_t j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / static_cast<double>(j);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (t * p1 - p0) / (t * t - 1.0);
            const double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-16) {
                break;
            }
        }
        nodes[i] = t;
        weights[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return {nodes, weights};
}

/// 64-point composite rule on [a, b]: 8 panels of 8-point Gauss-Legendre.
template <class F>
double integrate64(F&& f, double a, double b) {
    static const auto rule = gauss_legendre(8);
    const double panel = (b - a) / 8.0;
    double acc = 0.0;
    for (int p = 0; p < 8; ++p) {
        const double lo = a + panel * p;
        for (std::size_t i = 0; i < 8; ++i) {
            const double x = lo + 0.5 * panel * (rule.first[i] + 1.0);
            acc += 0.5 * panel * rule.second[i] * f(x);
        }
    }
    return acc;
}

struct VertexResult {
    shapeci::LpStatus status = shapeci::LpStatus::Infeasible;
    double objective = 0.0;
    Vector beta;
};

/// Best vertex of {g beta <= h} intersected with the box |beta_i| <= box.
inline VertexResult boxed_vertex_enumeration(const shapeci::LpProblem& p, double box) {
    const std::size_t k = p.c.size();
    const std::size_t m = p.g.rows();
    // Rows: original then the 2k box rows.
    Matrix g(m + 2 * k, k);
    Vector h(m + 2 * k);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            g(i, j) = p.g(i, j);
        }
        h[i] = p.h[i];
    }
    for (std::size_t j = 0; j < k; ++j) {
        g(m + 2 * j, j) = 1.0;
        h[m + 2 * j] = box;
        g(m + 2 * j + 1, j) = -1.0;
        h[m + 2 * j + 1] = box;
    }
    const std::size_t total = g.rows();
    const double sign = p.sense == shapeci::Sense::Minimize ? 1.0 : -1.0;

    VertexResult best;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick(k);
    std::vector<bool> mask(total, false);
    std::fill(mask.end() - static_cast<std::ptrdiff_t>(k), mask.end(), true);
    do {
        std::size_t c = 0;
        for (std::size_t i = 0; i < total; ++i) {
            if (mask[i]) {
                pick[c++] = i;
            }
        }
        Matrix sub(k, k);
        Vector rhs(k);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t j = 0; j < k; ++j) {
                sub(a, j) = g(pick[a], j);
            }
            rhs[a] = h[pick[a]];
        }
        const auto inv = gauss_jordan_inverse(sub, 1e-10);
        if (!inv) {
            continue;
        }
        const Vector v = mat_vec(*inv, rhs);
        bool feasible = true;
        for (std::size_t i = 0; i < total && feasible; ++i) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                lhs += g(i, j) * v[j];
            }
            feasible = lhs <= h[i] + 1e-9 * std::max(1.0, std::abs(h[i]));
        }
        if (!feasible) {
            continue;
        }
        double val = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            val += p.c[j] * v[j];
        }
        if (sign * val < best_val) {
            best_val = sign * val;
            best.beta = v;
            best.objective = val;
            best.status = shapeci::LpStatus::Optimal;
        }
    } while (std::next_permutation(mask.begin(), mask.end()));

    return best;
}

/// Brute-force LP by vertex enumeration. No vertex inside the box means
/// infeasible; an optimum that moves when the box doubles means unbounded.
inline VertexResult vertex_enumeration(const shapeci::LpProblem& p, double box = 1e6) {
    VertexResult small = boxed_vertex_enumeration(p, box);
    if (small.status != shapeci::LpStatus::Optimal) {
        return small;
    }
    const VertexResult big = boxed_vertex_enumeration(p, 2.0 * box);
    if (std::abs(big.objective - small.objective) > 1e-6 * std::max(1.0, std::abs(small.objective))) {
        small.status = shapeci::LpStatus::Unbounded;
    }
    return small;
}

/// Small random LP: k in 1..3, m in 1..6, entries uniform on [-1, 1] and
/// right sides uniform on [-0.5, 1]. Mixes optimal, infeasible and unbounded
/// instances.
inline shapeci::LpProblem random_lp(std::mt19937_64& eng) {
    std::uniform_int_distribution<std::size_t> kd(1, 3);
    std::uniform_int_distribution<std::size_t> md(1, 6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> uh(-0.5, 1.0);
    shapeci::LpProblem p;
    const std::size_t k = kd(eng);
    const std::size_t m = md(eng);
    p.sense = eng() % 2 == 0 ? shapeci::Sense::Minimize : shapeci::Sense::Maximize;
    p.c.resize(k);
    for (double& v : p.c) {
        v = u(eng);
    }
    p.g = random_matrix(m, k, eng);
    p.h.resize(m);
    for (double& v : p.h) {
        v = uh(eng);
    }
    return p;
}

/// Random LP whose feasible set is bounded: random rows plus a box.
inline shapeci::LpProblem random_bounded_lp(std::mt19937_64& eng) {
    shapeci::LpProblem p = random_lp(eng);
    const std::size_t k = p.c.size();
    const std::size_t extra = 2 * k;
    Matrix g(p.g.rows() + extra, k);
    Vector h(p.h);
    for (std::size_t i = 0; i < p.g.rows(); ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            g(i, j) = p.g(i, j);
        }
    }
    std::uniform_real_distribution<double> side(1.0, 3.0);
    for (std::size_t j = 0; j < k; ++j) {
        g(p.g.rows() + 2 * j, j) = 1.0;
        g(p.g.rows() + 2 * j + 1, j) = -1.0;
        h.push_back(side(eng));
        h.push_back(side(eng));
    }
    p.g = g;
    p.h = h;
    return p;
}

} // namespace oracle
