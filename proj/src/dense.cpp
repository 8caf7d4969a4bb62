#include "dsp/dense.hpp"

#include <algorithm>
#include <cmath>

#include "dsp/sparse.hpp"

namespace dsp {

DenseMatrix DenseMatrix::identity(index_t n) {
    DenseMatrix m(n, n);
    for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& s) {
    DenseMatrix m(s.rows(), s.cols());
    for (index_t i = 0; i < s.rows(); ++i)
        for (index_t k = s.row_ptr()[static_cast<std::size_t>(i)];
             k < s.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
            m(i, s.col_idx()[static_cast<std::size_t>(k)]) =
                s.values()[static_cast<std::size_t>(k)];
    return m;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("dense multiply: dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (index_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        for (index_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (index_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (index_t i = 0; i < a.rows(); ++i)
        for (index_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Vector multiply(const DenseMatrix& a, const Vector& x) {
    if (static_cast<index_t>(x.size()) != a.cols())
        throw DimensionError("dense gemv: dimension mismatch");
    Vector y(static_cast<std::size_t>(a.rows()), 0.0);
    for (index_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double s = 0.0;
        for (index_t j = 0; j < a.cols(); ++j) s += ai[j] * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

double frobenius_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double symmetry_gap(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("symmetry_gap: matrix not square");
    double m = 0.0;
    for (index_t i = 0; i < a.rows(); ++i)
        for (index_t j = 0; j < i; ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
    return m;
}

DenseMatrix dense_inverse(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("dense_inverse: matrix not square");
    const index_t n = a.rows();
    DenseMatrix work = a;
    DenseMatrix inv = DenseMatrix::identity(n);
    for (index_t k = 0; k < n; ++k) {
        index_t piv = k;
        for (index_t i = k + 1; i < n; ++i)
            if (std::abs(work(i, k)) > std::abs(work(piv, k))) piv = i;
        if (work(piv, k) == 0.0)
            throw SingularFactorError("dense_inverse: singular matrix", k);
        if (piv != k) {
            for (index_t j = 0; j < n; ++j) {
                std::swap(work(k, j), work(piv, j));
                std::swap(inv(k, j), inv(piv, j));
            }
        }
        const double d = work(k, k);
        for (index_t j = 0; j < n; ++j) {
            work(k, j) /= d;
            inv(k, j) /= d;
        }
        for (index_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = work(i, k);
            if (f == 0.0) continue;
            for (index_t j = 0; j < n; ++j) {
                work(i, j) -= f * work(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

index_t dense_rank(DenseMatrix a, double rel_tol) {
    const index_t rows = a.rows(), cols = a.cols();
    const double scale = std::max(max_abs(a), 1e-300);
    index_t rank = 0;
    index_t r = 0, c = 0;
    while (r < rows && c < cols) {
        // full pivoting over the remaining block
        index_t pi = r, pj = c;
        double best = 0.0;
        for (index_t i = r; i < rows; ++i)
            for (index_t j = c; j < cols; ++j)
                if (std::abs(a(i, j)) > best) {
                    best = std::abs(a(i, j));
                    pi = i;
                    pj = j;
                }
        if (best <= rel_tol * scale) break;
        for (index_t j = 0; j < cols; ++j) std::swap(a(r, j), a(pi, j));
        for (index_t i = 0; i < rows; ++i) std::swap(a(i, c), a(i, pj));
        for (index_t i = r + 1; i < rows; ++i) {
            const double f = a(i, c) / a(r, c);
            if (f == 0.0) continue;
            for (index_t j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
        }
        ++rank;
        ++r;
        ++c;
    }
    return rank;
}

}  // namespace dsp
