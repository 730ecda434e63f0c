#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace shapeci {

using Vector = std::vector<double>;

/// Dense row-major real matrix. Sized for sieve dimensions (k up to ~50)
/// and score matrices (n x k); no expression templates, no aliasing tricks.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);
    static Matrix row_vector(std::span<const double> v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    std::span<const double> data() const noexcept { return data_; }

    Matrix transpose() const;
    bool is_square() const noexcept { return rows_ == cols_; }
    bool all_finite() const noexcept;

    /// Appends the rows of `other` (which must have the same column count).
    void append_rows(const Matrix& other);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> v);
/// Largest absolute entry.
double max_abs(const Matrix& m);

/// (m + m^T) / 2.
Matrix symmetrized(const Matrix& m);

struct EigenDecomposition {
    Vector values;
    Matrix vectors; ///< eigenvectors in columns, matching `values`
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. The input is
/// symmetrized first. Throws DomainError for non-square input and
/// IterationLimit if 50 sweeps do not drive the off-diagonal mass to zero.
EigenDecomposition jacobi_eigen(const Matrix& m);

/// Relative eigenvalue cutoff below which a PD matrix counts as singular.
inline constexpr double kConditionCutoff = 1e-12;

/// Symmetric inverse square root S with S*S*m = I. Throws NearSingular
/// when min eigenvalue <= 1e-12 * max eigenvalue.
Matrix inv_sqrt_sym(const Matrix& m);

/// Solves m x = b for symmetric positive-definite m by Cholesky.
/// Same conditioning requirement as inv_sqrt_sym.
Vector solve_spd(const Matrix& m, std::span<const double> b);

/// Solves m X = B column-wise.
Matrix solve_spd(const Matrix& m, const Matrix& b);

} // namespace shapeci
