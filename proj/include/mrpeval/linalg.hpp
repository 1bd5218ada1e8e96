#pragma once

#include <cstddef>
#include <vector>

// Small dense linear algebra: row-major matrices, LU solves with partial
// pivoting, and a Jacobi eigensolver for symmetric matrices. Everything here
// targets desk-scale dimensions (D <= a few hundred); clarity and exactness
// over asymptotic speed.

namespace mrpeval {

using Vector = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix mat_mul(const Matrix& a, const Matrix& b);
Vector mat_vec(const Matrix& a, const Vector& x);
Matrix transpose(const Matrix& a);

/// PA = LU factorization with partial pivoting. Throws ValidationError on a
/// numerically singular pivot.
class LuDecomposition {
public:
    explicit LuDecomposition(Matrix a);
    Vector solve(Vector b) const;
    std::size_t dim() const { return lu_.rows(); }

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
};

Vector solve_linear(const Matrix& a, const Vector& b);
Matrix invert(const Matrix& a);

/// A = V diag(values) V^T with orthonormal columns of V; cyclic Jacobi.
struct SymmetricEigen {
    Vector values;
    Matrix vectors;
};
SymmetricEigen symmetric_eigen(Matrix a, int max_sweeps = 100);

double linf_norm(const Vector& v);
double linf_distance(const Vector& a, const Vector& b);
/// Maximum absolute row sum (the operator infinity-norm).
double max_abs_row_sum(const Matrix& a);
/// Maximum Euclidean row norm (the (2,inf) operator norm).
double max_row_two_norm(const Matrix& a);

} // namespace mrpeval
