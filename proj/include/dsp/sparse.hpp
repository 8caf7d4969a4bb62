#pragma once

/// @file sparse.hpp
/// @brief Compressed row-major sparse matrices and the kernels built on them.
///
/// Storage is canonical CSR: column indices strictly increasing within each
/// row, offsets non-decreasing, no explicitly stored zeros. Construction
/// canonicalizes (sorts, sums duplicates, drops zeros); after that matrices
/// are immutable and safe for concurrent reads.

#include <vector>

#include "dsp/types.hpp"

namespace dsp {

struct Triplet {
    index_t row;
    index_t col;
    double value;
};

class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Canonicalizing constructor: sorts triplets, sums duplicates and drops
    /// entries that cancel to exact zero.
    static SparseMatrix from_triplets(index_t rows, index_t cols,
                                      std::vector<Triplet> triplets);

    /// Builds directly from pre-sorted CSR arrays. Validates the invariants
    /// (strictly increasing columns per row, indices in range) and drops
    /// stored zeros.
    static SparseMatrix from_csr(index_t rows, index_t cols,
                                 std::vector<index_t> row_ptr,
                                 std::vector<index_t> col_idx,
                                 std::vector<double> values);

    static SparseMatrix identity(index_t n);
    static SparseMatrix diagonal(const Vector& d);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    index_t nnz() const { return static_cast<index_t>(values_.size()); }

    const std::vector<index_t>& row_ptr() const { return row_ptr_; }
    const std::vector<index_t>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    /// Entry lookup by binary search within the row; zero if not stored.
    double coeff(index_t i, index_t j) const;

    Vector extract_diagonal() const;

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<index_t> row_ptr_{0};
    std::vector<index_t> col_idx_;
    std::vector<double> values_;
};

/// Incremental row-ordered builder: rows must be appended in order and each
/// row's columns in strictly increasing order. O(nnz), no sort.
class RowBuilder {
public:
    RowBuilder(index_t rows, index_t cols);
    void add(index_t col, double value);  // append to the current row
    void finish_row();                    // close the current row
    SparseMatrix build();                 // closes remaining rows

private:
    index_t rows_;
    index_t cols_;
    index_t current_row_ = 0;
    index_t last_col_ = -1;
    std::vector<index_t> row_ptr_;
    std::vector<index_t> col_idx_;
    std::vector<double> values_;
};

/// y = M x (or M'x with transpose). Throws DimensionError on mismatch.
Vector spmv(const SparseMatrix& M, const Vector& x, bool transpose = false);

/// y += alpha * M x
void spmv_add(const SparseMatrix& M, const Vector& x, double alpha, Vector& y,
              bool transpose = false);

SparseMatrix transpose(const SparseMatrix& M);

/// Kronecker product. Checked for index overflow.
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);

/// C = A * B (general sparse product, row-wise with dense accumulator).
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/// Scale columns: M * diag(d).
SparseMatrix scale_columns(const SparseMatrix& m, const Vector& d);

/// The band |i - j| <= 1 of a square matrix.
SparseMatrix tridiagonal_part(const SparseMatrix& m);

enum class TriangularMode { lower, upper, lower_transpose };

/// Forward/back substitution on a triangular CSR factor.
/// Throws SingularFactorError on a zero or sub-normal diagonal.
Vector triangular_solve(const SparseMatrix& l, const Vector& b,
                        TriangularMode mode);

}  // namespace dsp
