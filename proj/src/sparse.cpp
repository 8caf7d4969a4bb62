#include "dsp/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dsp {

namespace {

void check_index_range(index_t rows, index_t cols, index_t r, index_t c) {
    if (r < 0 || r >= rows || c < 0 || c >= cols)
        throw DimensionError("sparse: entry index out of range");
}

}  // namespace

SparseMatrix SparseMatrix::from_triplets(index_t rows, index_t cols,
                                         std::vector<Triplet> triplets) {
    if (rows < 0 || cols < 0) throw DimensionError("sparse: negative dimension");
    for (const Triplet& t : triplets) check_index_range(rows, cols, t.row, t.col);
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
    m.col_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());

    std::size_t i = 0;
    for (index_t r = 0; r < rows; ++r) {
        while (i < triplets.size() && triplets[i].row == r) {
            index_t c = triplets[i].col;
            double v = 0.0;
            while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
                v += triplets[i].value;  // duplicates are summed
                ++i;
            }
            if (v != 0.0) {
                m.col_idx_.push_back(c);
                m.values_.push_back(v);
            }
        }
        m.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<index_t>(m.col_idx_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::from_csr(index_t rows, index_t cols,
                                    std::vector<index_t> row_ptr,
                                    std::vector<index_t> col_idx,
                                    std::vector<double> values) {
    if (rows < 0 || cols < 0) throw DimensionError("sparse: negative dimension");
    if (row_ptr.size() != static_cast<std::size_t>(rows) + 1 ||
        col_idx.size() != values.size() ||
        row_ptr.front() != 0 ||
        row_ptr.back() != static_cast<index_t>(col_idx.size()))
        throw DimensionError("sparse: malformed CSR arrays");

    bool has_zero = false;
    for (index_t r = 0; r < rows; ++r) {
        index_t prev = -1;
        for (index_t k = row_ptr[static_cast<std::size_t>(r)];
             k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            index_t c = col_idx[static_cast<std::size_t>(k)];
            check_index_range(rows, cols, r, c);
            if (c <= prev) throw DimensionError("sparse: columns not strictly increasing");
            prev = c;
            if (values[static_cast<std::size_t>(k)] == 0.0) has_zero = true;
        }
    }

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    if (!has_zero) {
        m.row_ptr_ = std::move(row_ptr);
        m.col_idx_ = std::move(col_idx);
        m.values_ = std::move(values);
        return m;
    }
    // squeeze out explicit zeros
    m.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
    for (index_t r = 0; r < rows; ++r) {
        for (index_t k = row_ptr[static_cast<std::size_t>(r)];
             k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            if (values[static_cast<std::size_t>(k)] != 0.0) {
                m.col_idx_.push_back(col_idx[static_cast<std::size_t>(k)]);
                m.values_.push_back(values[static_cast<std::size_t>(k)]);
            }
        }
        m.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<index_t>(m.col_idx_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::identity(index_t n) {
    SparseMatrix m;
    m.rows_ = m.cols_ = n;
    m.row_ptr_.resize(static_cast<std::size_t>(n) + 1);
    m.col_idx_.resize(static_cast<std::size_t>(n));
    m.values_.assign(static_cast<std::size_t>(n), 1.0);
    for (index_t i = 0; i <= n; ++i) m.row_ptr_[static_cast<std::size_t>(i)] = i;
    for (index_t i = 0; i < n; ++i) m.col_idx_[static_cast<std::size_t>(i)] = i;
    return m;
}

SparseMatrix SparseMatrix::diagonal(const Vector& d) {
    SparseMatrix m = identity(static_cast<index_t>(d.size()));
    m.values_ = d;
    // canonical form forbids stored zeros
    bool has_zero = false;
    for (double v : d) has_zero |= (v == 0.0);
    if (!has_zero) return m;
    std::vector<Triplet> ts;
    for (index_t i = 0; i < static_cast<index_t>(d.size()); ++i)
        ts.push_back({i, i, d[static_cast<std::size_t>(i)]});
    return from_triplets(m.rows_, m.cols_, std::move(ts));
}

double SparseMatrix::coeff(index_t i, index_t j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
        throw DimensionError("coeff: index out of range");
    auto begin = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i)];
    auto end = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
    auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Vector SparseMatrix::extract_diagonal() const {
    index_t n = std::min(rows_, cols_);
    Vector d(static_cast<std::size_t>(n), 0.0);
    for (index_t i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = coeff(i, i);
    return d;
}

RowBuilder::RowBuilder(index_t rows, index_t cols) : rows_(rows), cols_(cols) {
    row_ptr_.reserve(static_cast<std::size_t>(rows) + 1);
    row_ptr_.push_back(0);
}

void RowBuilder::add(index_t col, double value) {
    if (current_row_ >= rows_) throw DimensionError("RowBuilder: too many rows");
    if (col <= last_col_ || col < 0 || col >= cols_)
        throw DimensionError("RowBuilder: columns must be strictly increasing and in range");
    last_col_ = col;
    if (value == 0.0) return;
    col_idx_.push_back(col);
    values_.push_back(value);
}

void RowBuilder::finish_row() {
    if (current_row_ >= rows_) throw DimensionError("RowBuilder: too many rows");
    ++current_row_;
    last_col_ = -1;
    row_ptr_.push_back(static_cast<index_t>(col_idx_.size()));
}

SparseMatrix RowBuilder::build() {
    while (current_row_ < rows_) finish_row();
    return SparseMatrix::from_csr(rows_, cols_, std::move(row_ptr_),
                                  std::move(col_idx_), std::move(values_));
}

Vector spmv(const SparseMatrix& M, const Vector& x, bool transpose) {
    Vector y(static_cast<std::size_t>(transpose ? M.cols() : M.rows()), 0.0);
    spmv_add(M, x, 1.0, y, transpose);
    return y;
}

void spmv_add(const SparseMatrix& M, const Vector& x, double alpha, Vector& y,
              bool transpose) {
    const index_t in_dim = transpose ? M.rows() : M.cols();
    const index_t out_dim = transpose ? M.cols() : M.rows();
    if (static_cast<index_t>(x.size()) != in_dim ||
        static_cast<index_t>(y.size()) != out_dim)
        throw DimensionError("spmv: dimension mismatch");

    const auto& rp = M.row_ptr();
    const auto& ci = M.col_idx();
    const auto& v = M.values();
    if (!transpose) {
        for (index_t i = 0; i < M.rows(); ++i) {
            double s = 0.0;
            for (index_t k = rp[static_cast<std::size_t>(i)];
                 k < rp[static_cast<std::size_t>(i) + 1]; ++k)
                s += v[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(ci[static_cast<std::size_t>(k)])];
            y[static_cast<std::size_t>(i)] += alpha * s;
        }
    } else {
        for (index_t i = 0; i < M.rows(); ++i) {
            const double xi = alpha * x[static_cast<std::size_t>(i)];
            if (xi == 0.0) continue;
            for (index_t k = rp[static_cast<std::size_t>(i)];
                 k < rp[static_cast<std::size_t>(i) + 1]; ++k)
                y[static_cast<std::size_t>(ci[static_cast<std::size_t>(k)])] +=
                    v[static_cast<std::size_t>(k)] * xi;
        }
    }
}

SparseMatrix transpose(const SparseMatrix& M) {
    const auto& rp = M.row_ptr();
    const auto& ci = M.col_idx();
    const auto& v = M.values();
    std::vector<index_t> t_ptr(static_cast<std::size_t>(M.cols()) + 1, 0);
    for (index_t c : ci) ++t_ptr[static_cast<std::size_t>(c) + 1];
    for (index_t j = 0; j < M.cols(); ++j)
        t_ptr[static_cast<std::size_t>(j) + 1] += t_ptr[static_cast<std::size_t>(j)];
    std::vector<index_t> t_col(ci.size());
    std::vector<double> t_val(v.size());
    std::vector<index_t> next(t_ptr.begin(), t_ptr.end() - 1);
    for (index_t i = 0; i < M.rows(); ++i) {
        for (index_t k = rp[static_cast<std::size_t>(i)];
             k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
            index_t j = ci[static_cast<std::size_t>(k)];
            index_t pos = next[static_cast<std::size_t>(j)]++;
            t_col[static_cast<std::size_t>(pos)] = i;
            t_val[static_cast<std::size_t>(pos)] = v[static_cast<std::size_t>(k)];
        }
    }
    return SparseMatrix::from_csr(M.cols(), M.rows(), std::move(t_ptr),
                                  std::move(t_col), std::move(t_val));
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows() == 0 || a.cols() == 0 || b.rows() == 0 || b.cols() == 0)
        throw DimensionError("kron: empty operand");
    index_t rows, cols, nnz;
    if (__builtin_mul_overflow(a.rows(), b.rows(), &rows) ||
        __builtin_mul_overflow(a.cols(), b.cols(), &cols) ||
        __builtin_mul_overflow(a.nnz(), b.nnz(), &nnz))
        throw std::overflow_error("kron: dimension overflow");

    std::vector<index_t> row_ptr;
    row_ptr.reserve(static_cast<std::size_t>(rows) + 1);
    row_ptr.push_back(0);
    std::vector<index_t> col_idx;
    col_idx.reserve(static_cast<std::size_t>(nnz));
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(nnz));

    const auto& arp = a.row_ptr();
    const auto& brp = b.row_ptr();
    for (index_t ia = 0; ia < a.rows(); ++ia) {
        for (index_t ib = 0; ib < b.rows(); ++ib) {
            for (index_t ka = arp[static_cast<std::size_t>(ia)];
                 ka < arp[static_cast<std::size_t>(ia) + 1]; ++ka) {
                const index_t ja = a.col_idx()[static_cast<std::size_t>(ka)];
                const double va = a.values()[static_cast<std::size_t>(ka)];
                for (index_t kb = brp[static_cast<std::size_t>(ib)];
                     kb < brp[static_cast<std::size_t>(ib) + 1]; ++kb) {
                    col_idx.push_back(ja * b.cols() + b.col_idx()[static_cast<std::size_t>(kb)]);
                    values.push_back(va * b.values()[static_cast<std::size_t>(kb)]);
                }
            }
            row_ptr.push_back(static_cast<index_t>(col_idx.size()));
        }
    }
    return SparseMatrix::from_csr(rows, cols, std::move(row_ptr),
                                  std::move(col_idx), std::move(values));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimension mismatch");
    std::vector<double> accum(static_cast<std::size_t>(b.cols()), 0.0);
    std::vector<index_t> touched;
    RowBuilder out(a.rows(), b.cols());
    for (index_t i = 0; i < a.rows(); ++i) {
        touched.clear();
        for (index_t ka = a.row_ptr()[static_cast<std::size_t>(i)];
             ka < a.row_ptr()[static_cast<std::size_t>(i) + 1]; ++ka) {
            const index_t k = a.col_idx()[static_cast<std::size_t>(ka)];
            const double va = a.values()[static_cast<std::size_t>(ka)];
            for (index_t kb = b.row_ptr()[static_cast<std::size_t>(k)];
                 kb < b.row_ptr()[static_cast<std::size_t>(k) + 1]; ++kb) {
                const index_t j = b.col_idx()[static_cast<std::size_t>(kb)];
                if (accum[static_cast<std::size_t>(j)] == 0.0) touched.push_back(j);
                accum[static_cast<std::size_t>(j)] += va * b.values()[static_cast<std::size_t>(kb)];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (index_t j : touched) {
            out.add(j, accum[static_cast<std::size_t>(j)]);
            accum[static_cast<std::size_t>(j)] = 0.0;
        }
        out.finish_row();
    }
    return out.build();
}

SparseMatrix scale_columns(const SparseMatrix& m, const Vector& d) {
    if (static_cast<index_t>(d.size()) != m.cols())
        throw DimensionError("scale_columns: dimension mismatch");
    std::vector<index_t> rp = m.row_ptr();
    std::vector<index_t> ci = m.col_idx();
    std::vector<double> v = m.values();
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] *= d[static_cast<std::size_t>(ci[k])];
    return SparseMatrix::from_csr(m.rows(), m.cols(), std::move(rp), std::move(ci), std::move(v));
}

SparseMatrix tridiagonal_part(const SparseMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("tridiagonal_part: matrix not square");
    RowBuilder out(m.rows(), m.cols());
    for (index_t i = 0; i < m.rows(); ++i) {
        for (index_t k = m.row_ptr()[static_cast<std::size_t>(i)];
             k < m.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            index_t j = m.col_idx()[static_cast<std::size_t>(k)];
            if (j >= i - 1 && j <= i + 1) out.add(j, m.values()[static_cast<std::size_t>(k)]);
        }
        out.finish_row();
    }
    return out.build();
}

namespace {

double checked_diag(double d, index_t i) {
    if (d == 0.0 || std::fpclassify(d) == FP_SUBNORMAL)
        throw SingularFactorError("triangular_solve: zero or sub-normal diagonal", i);
    return d;
}

}  // namespace

Vector triangular_solve(const SparseMatrix& l, const Vector& b, TriangularMode mode) {
    const index_t n = l.rows();
    if (l.rows() != l.cols() || static_cast<index_t>(b.size()) != n)
        throw DimensionError("triangular_solve: dimension mismatch");
    const auto& rp = l.row_ptr();
    const auto& ci = l.col_idx();
    const auto& v = l.values();
    Vector x = b;

    switch (mode) {
        case TriangularMode::lower:
            for (index_t i = 0; i < n; ++i) {
                double s = x[static_cast<std::size_t>(i)];
                double diag = 0.0;
                for (index_t k = rp[static_cast<std::size_t>(i)];
                     k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
                    const index_t j = ci[static_cast<std::size_t>(k)];
                    if (j < i)
                        s -= v[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(j)];
                    else if (j == i)
                        diag = v[static_cast<std::size_t>(k)];
                    else
                        throw DimensionError("triangular_solve: entry above diagonal in lower factor");
                }
                x[static_cast<std::size_t>(i)] = s / checked_diag(diag, i);
            }
            break;
        case TriangularMode::upper:
            for (index_t i = n - 1; i >= 0; --i) {
                double s = x[static_cast<std::size_t>(i)];
                double diag = 0.0;
                for (index_t k = rp[static_cast<std::size_t>(i)];
                     k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
                    const index_t j = ci[static_cast<std::size_t>(k)];
                    if (j > i)
                        s -= v[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(j)];
                    else if (j == i)
                        diag = v[static_cast<std::size_t>(k)];
                    else
                        throw DimensionError("triangular_solve: entry below diagonal in upper factor");
                }
                x[static_cast<std::size_t>(i)] = s / checked_diag(diag, i);
            }
            break;
        case TriangularMode::lower_transpose:
            // Solve L'x = b by columns of L', i.e. rows of L, backwards.
            for (index_t i = n - 1; i >= 0; --i) {
                const index_t begin = rp[static_cast<std::size_t>(i)];
                const index_t end = rp[static_cast<std::size_t>(i) + 1];
                double diag = 0.0;
                if (end > begin && ci[static_cast<std::size_t>(end - 1)] == i)
                    diag = v[static_cast<std::size_t>(end - 1)];
                const double xi = x[static_cast<std::size_t>(i)] / checked_diag(diag, i);
                x[static_cast<std::size_t>(i)] = xi;
                for (index_t k = begin; k < end - 1; ++k) {
                    const index_t j = ci[static_cast<std::size_t>(k)];
                    if (j > i)
                        throw DimensionError("triangular_solve: entry above diagonal in lower factor");
                    x[static_cast<std::size_t>(j)] -= v[static_cast<std::size_t>(k)] * xi;
                }
            }
            break;
    }
    return x;
}

}  // namespace dsp
