#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cascade {

/// Dense row-major matrix; only what the stability analysis needs.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double frobenius_norm() const noexcept;
    /// Largest |a_ij - a_ji|; requires a square matrix.
    double asymmetry() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// Throws InvalidInput when the matrix is not square or not symmetric within
/// 1e-9 (relative to its norm when that exceeds 1).
std::vector<double> numeric_eigenvalues(const Matrix& a);

/// Solves a x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve(Matrix a, std::vector<double> b);

} // namespace cascade
