#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace esn {

/// Dense row-major matrix of doubles. The numerical workhorse for reservoir
/// states, weight matrices and class indicator targets.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& storage() { return data_; }
    const std::vector<double>& storage() const { return data_; }

    bool operator==(const Matrix&) const = default;

    // Throws std::invalid_argument when any entry is NaN/Inf or the matrix is
    // empty; `what` names the offending argument in the message.
    void ensure_finite(const char* what) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

/// a * aᵀ (symmetric rows×rows Gram matrix).
Matrix gram(const Matrix& a);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

/// Columns of a rank-R orthonormal basis in an N-dimensional state space.
/// Construction via make_orthonormal_basis verifies UᵀU = I to 1e-8.
struct OrthonormalBasis {
    std::size_t dim = 0;
    std::size_t rank = 0;
    Matrix columns;  // dim × rank
};

OrthonormalBasis make_orthonormal_basis(Matrix columns);

// ---------------------------------------------------------------------------
// Shared numerical kernels
// ---------------------------------------------------------------------------

/// Ridge (Tikhonov) solve via the N×N normal equations:
///   W = targets · statesᵀ · (states·statesᵀ + lambda·I)⁻¹
/// minimizing ‖targets − W·states‖₂² + lambda‖W‖₂².
/// states is N×J, targets K×J, result K×N. Throws "singular normal equations"
/// when lambda = 0 and states·statesᵀ is not invertible.
Matrix ridge_solve(const Matrix& states, const Matrix& targets, double lambda);

/// Ridge solve from precomputed Gram (N×N) and cross (K×N) terms:
///   W = cross · (gram + lambda·I)⁻¹.
Matrix ridge_from_gram(const Matrix& gram, const Matrix& cross, double lambda);

/// Leading R left singular vectors of states (uncentered), ordered by
/// nonincreasing singular value. Sign convention: the largest-magnitude entry
/// of each column is positive. Computed from the symmetric eigendecomposition
/// of states·statesᵀ.
OrthonormalBasis principal_components(const Matrix& states, std::size_t rank);

/// Largest eigenvalue magnitude, relative accuracy 1e-6 or better. Power
/// iteration with magnitude tracking (a quadratic fit on three consecutive
/// iterates handles dominant complex pairs); falls back to a norm-based
/// repeated-squaring estimate when the iteration has not settled after 5000
/// steps.
double spectral_radius(const Matrix& square);

// Lower-level pieces, exposed for reuse and direct testing.

/// In-place lower Cholesky of an SPD matrix; false when a pivot is not
/// positive (matrix not positive definite to working precision).
bool cholesky_inplace(Matrix& m);

/// Solves spd · X = rhs for X (rhs and X are N×K), using Cholesky. Throws on
/// a non-positive-definite system.
Matrix solve_spd(Matrix spd, const Matrix& rhs);

struct SymmetricEigen {
    std::vector<double> values;  // unordered
    Matrix vectors;              // column i pairs with values[i]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymmetricEigen jacobi_eigen_symmetric(const Matrix& sym);

}  // namespace esn
