#include "cascade/linalg.hpp"

#include "cascade/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace cascade {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double Matrix::frobenius_norm() const noexcept {
    double sum = 0.0;
    for (double x : data_) sum += x * x;
    return std::sqrt(sum);
}

double Matrix::asymmetry() const {
    if (rows_ != cols_) {
        throw InvalidInput("asymmetry needs a square matrix");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = i + 1; j < cols_; ++j) {
            worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
        }
    }
    return worst;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) sum += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(sum);
}

} // namespace

std::vector<double> numeric_eigenvalues(const Matrix& input) {
    const std::size_t n = input.rows();
    if (n != input.cols()) {
        throw InvalidInput("eigenvalues need a square matrix");
    }
    const double norm = input.frobenius_norm();
    if (!std::isfinite(norm)) {
        throw InvalidInput("matrix has non-finite entries");
    }
    if (input.asymmetry() > 1e-9 * std::max(1.0, norm)) {
        throw InvalidInput("matrix is not symmetric");
    }

    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = 0.5 * (input(i, j) + input(j, i));
        }
    }

    const double target = 1e-12 * norm;
    for (int sweep = 0; sweep < 100 && off_diagonal_norm(a) > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = c * arp - s * arq;
                    a(r, q) = a(q, r) = s * arp + c * arq;
                }
            }
        }
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<double> solve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (n != a.cols() || b.size() != n) {
        throw InvalidInput("solve: dimension mismatch");
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (a(pivot, col) == 0.0) {
            throw InvalidInput("solve: singular matrix");
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double sum = b[i];
        for (std::size_t c = i + 1; c < n; ++c) sum -= a(i, c) * x[c];
        x[i] = sum / a(i, i);
    }
    return x;
}

} // namespace cascade
