#include "shapeci/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shapeci/errors.hpp"

namespace shapeci {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DomainError(std::string(op) + ": shape mismatch");
    }
}

// Throws NearSingular unless the spectrum is bounded away from zero.
void require_well_conditioned(std::span<const double> eigenvalues, const char* op) {
    const auto [lo, hi] = std::minmax_element(eigenvalues.begin(), eigenvalues.end());
    if (eigenvalues.empty() || !(*hi > 0.0) || !(*lo > kConditionCutoff * *hi)) {
        const double lo_v = eigenvalues.empty() ? 0.0 : *lo;
        const double hi_v = eigenvalues.empty() ? 0.0 : *hi;
        throw NearSingular(std::string(op) + ": matrix is not positive definite to working precision (eigenvalue range [" +
                           std::to_string(lo_v) + ", " + std::to_string(hi_v) + "])");
    }
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw DomainError("Matrix: ragged initializer");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(i, i) = d[i];
    }
    return m;
}

Matrix Matrix::row_vector(std::span<const double> v) {
    Matrix m(1, v.size());
    std::copy(v.begin(), v.end(), m.row(0).begin());
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Matrix::append_rows(const Matrix& other) {
    if (other.rows_ == 0) {
        return;
    }
    if (rows_ == 0 && cols_ == 0) {
        *this = other;
        return;
    }
    if (other.cols_ != cols_) {
        throw DomainError("Matrix::append_rows: column mismatch");
    }
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    rows_ += other.rows_;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DomainError("matrix product: inner dimensions differ");
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const double ail = a(i, l);
            if (ail == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                c(i, j) += ail * b(l, j);
            }
        }
    }
    return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "matrix sum");
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            c(i, j) += b(i, j);
        }
    }
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "matrix difference");
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            c(i, j) -= b(i, j);
        }
    }
    return c;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (double& v : c.row(i)) {
            v *= s;
        }
    }
    return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) {
        throw DomainError("matrix-vector product: dimension mismatch");
    }
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        y[i] = dot(a.row(i), x);
    }
    return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

double max_abs(const Matrix& m) { return norm_inf(m.data()); }

Matrix symmetrized(const Matrix& m) {
    if (!m.is_square()) {
        throw DomainError("symmetrized: matrix is not square");
    }
    Matrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            s(i, j) = 0.5 * (m(i, j) + m(j, i));
        }
    }
    return s;
}

EigenDecomposition jacobi_eigen(const Matrix& m) {
    if (!m.is_square()) {
        throw DomainError("jacobi_eigen: matrix is not square");
    }
    constexpr int kMaxSweeps = 50;
    const std::size_t n = m.rows();
    Matrix a = symmetrized(m);
    Matrix v = Matrix::identity(n);

    double total = 0.0;
    for (double x : a.data()) {
        total += x * x;
    }
    const double scale = std::sqrt(total);

    auto off_diagonal = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                s += 2.0 * a(i, j) * a(i, j);
            }
        }
        return std::sqrt(s);
    };

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const double off = off_diagonal();
        if (off == 0.0 || off <= 1e-15 * scale) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                // Rotation angle annihilating a(p,q); stable tangent form.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(r, q) = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double apr = a(p, r);
                    const double aqr = a(q, r);
                    a(p, r) = c * apr - s * aqr;
                    a(q, r) = s * apr + c * aqr;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }
    if (!converged && off_diagonal() > 1e-15 * scale) {
        throw IterationLimit("jacobi_eigen: no convergence after 50 sweeps");
    }

    EigenDecomposition out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = a(i, i);
    }
    out.vectors = std::move(v);
    return out;
}

Matrix inv_sqrt_sym(const Matrix& m) {
    const EigenDecomposition eig = jacobi_eigen(m);
    require_well_conditioned(eig.values, "inv_sqrt_sym");
    const std::size_t n = m.rows();
    Matrix s(n, n);
    for (std::size_t l = 0; l < n; ++l) {
        const double w = 1.0 / std::sqrt(eig.values[l]);
        for (std::size_t i = 0; i < n; ++i) {
            const double vil = eig.vectors(i, l) * w;
            for (std::size_t j = 0; j < n; ++j) {
                s(i, j) += vil * eig.vectors(j, l);
            }
        }
    }
    return symmetrized(s);
}

namespace {

// Lower Cholesky factor; conditioning is checked beforehand.
Matrix cholesky(const Matrix& m) {
    require_well_conditioned(jacobi_eigen(m).values, "solve_spd");
    const std::size_t n = m.rows();
    const Matrix a = symmetrized(m);
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t p = 0; p < j; ++p) {
            d -= l(j, p) * l(j, p);
        }
        if (!(d > 0.0)) {
            throw NearSingular("solve_spd: Cholesky pivot is not positive");
        }
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t p = 0; p < j; ++p) {
                s -= l(i, p) * l(j, p);
            }
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

void cholesky_solve_in_place(const Matrix& l, std::span<double> x) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t p = 0; p < i; ++p) {
            s -= l(i, p) * x[p];
        }
        x[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t p = i + 1; p < n; ++p) {
            s -= l(p, i) * x[p];
        }
        x[i] = s / l(i, i);
    }
}

} // namespace

Vector solve_spd(const Matrix& m, std::span<const double> b) {
    if (!m.is_square() || m.rows() != b.size()) {
        throw DomainError("solve_spd: dimension mismatch");
    }
    const Matrix l = cholesky(m);
    Vector x(b.begin(), b.end());
    cholesky_solve_in_place(l, x);
    return x;
}

Matrix solve_spd(const Matrix& m, const Matrix& b) {
    if (!m.is_square() || m.rows() != b.rows()) {
        throw DomainError("solve_spd: dimension mismatch");
    }
    const Matrix l = cholesky(m);
    Matrix x(b.rows(), b.cols());
    Vector col(b.rows());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < b.rows(); ++i) {
            col[i] = b(i, j);
        }
        cholesky_solve_in_place(l, col);
        for (std::size_t i = 0; i < b.rows(); ++i) {
            x(i, j) = col[i];
        }
    }
    return x;
}

} // namespace shapeci
