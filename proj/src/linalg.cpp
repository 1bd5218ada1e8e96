#include "mrpeval/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mrpeval/errors.hpp"

namespace mrpeval {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ValidationError("mat_mul: dimension mismatch");
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

Vector mat_vec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw ValidationError("mat_vec: dimension mismatch");
    Vector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

LuDecomposition::LuDecomposition(Matrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw ValidationError("lu: matrix must be square");
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::fabs(lu_(col, col));
        for (std::size_t i = col + 1; i < n; ++i) {
            const double v = std::fabs(lu_(i, col));
            if (v > best) {
                best = v;
                pivot = i;
            }
        }
        if (best == 0.0) throw ValidationError("lu: singular matrix");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(pivot, j), lu_(col, j));
            std::swap(perm_[pivot], perm_[col]);
        }
        const double inv_pivot = 1.0 / lu_(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double factor = lu_(i, col) * inv_pivot;
            lu_(i, col) = factor;
            if (factor == 0.0) continue;
            for (std::size_t j = col + 1; j < n; ++j) lu_(i, j) -= factor * lu_(col, j);
        }
    }
}

Vector LuDecomposition::solve(Vector b) const {
    const std::size_t n = dim();
    if (b.size() != n) throw ValidationError("lu solve: dimension mismatch");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    // forward substitution, unit lower triangle
    for (std::size_t i = 1; i < n; ++i) {
        double acc = x[i];
        for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
        x[i] = acc;
    }
    // back substitution
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= lu_(ii, j) * x[j];
        x[ii] = acc / lu_(ii, ii);
    }
    return x;
}

Vector solve_linear(const Matrix& a, const Vector& b) {
    return LuDecomposition(a).solve(b);
}

Matrix invert(const Matrix& a) {
    const std::size_t n = a.rows();
    LuDecomposition lu(a);
    Matrix out(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        Vector col = lu.solve(e);
        for (std::size_t i = 0; i < n; ++i) out(i, j) = col[i];
        e[j] = 0.0;
    }
    return out;
}

SymmetricEigen symmetric_eigen(Matrix a, int max_sweeps) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw ValidationError("symmetric_eigen: matrix must be square");
    Matrix v = Matrix::identity(n);

    auto off_diagonal = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a(i, j)));
    const double tol = 1e-14 * std::max(scale, 1.0) * static_cast<double>(n);

    for (int sweep = 0; sweep < max_sweeps && off_diagonal() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double diff = a(q, q) - a(p, p);
                double t;
                if (std::fabs(apq) < 1e-30 * std::fabs(diff)) {
                    t = apq / diff;
                } else {
                    const double phi = diff / (2.0 * apq);
                    t = 1.0 / (std::fabs(phi) + std::sqrt(phi * phi + 1.0));
                    if (phi < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i != p && i != q) {
                        const double aip = a(i, p), aiq = a(i, q);
                        a(i, p) = aip - s * (aiq + tau * aip);
                        a(p, i) = a(i, p);
                        a(i, q) = aiq + s * (aip - tau * aiq);
                        a(q, i) = a(i, q);
                    }
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = vip - s * (viq + tau * vip);
                    v(i, q) = viq + s * (vip - tau * viq);
                }
            }
        }
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.vectors = std::move(v);
    return out;
}

double linf_norm(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double linf_distance(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw ValidationError("linf_distance: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

double max_abs_row_sum(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::fabs(a(i, j));
        m = std::max(m, s);
    }
    return m;
}

double max_row_two_norm(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

} // namespace mrpeval
