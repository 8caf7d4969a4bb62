#pragma once

/// @file factor.hpp
/// @brief Symmetric factorizations: dense Cholesky, bidiagonal Cholesky of
/// tridiagonal matrices, threshold incomplete Cholesky, and an exact solver
/// for block-diagonal SPD matrices.

#include <vector>

#include "dsp/dense.hpp"
#include "dsp/sparse.hpp"
#include "dsp/types.hpp"

namespace dsp {

enum class FactorKind { exact_cholesky, bidiagonal_cholesky, incomplete_cholesky };

struct LowerFactor {
    SparseMatrix L;  // lower triangular, strictly positive diagonal
    FactorKind kind = FactorKind::exact_cholesky;
    double drop_tolerance = 0.0;

    /// x = (L L')^{-1} b
    Vector solve(const Vector& b) const {
        return triangular_solve(L, triangular_solve(L, b, TriangularMode::lower),
                                TriangularMode::lower_transpose);
    }
};

/// Bidiagonal Cholesky factor of a symmetric tridiagonal SPD matrix.
LowerFactor chol_tridiag(const SparseMatrix& t);

/// Dense lower Cholesky factor (blocked, in-place style).
DenseMatrix chol_dense(const DenseMatrix& m);

Vector dense_lower_solve(const DenseMatrix& l, const Vector& b);
Vector dense_lower_transpose_solve(const DenseMatrix& l, const Vector& b);

/// x = (L L')^{-1} b given the dense factor.
Vector dense_chol_solve(const DenseMatrix& l, const Vector& b);

enum class DropRule { relative, absolute };

/// Threshold incomplete Cholesky (ICT): column-oriented elimination, entries
/// below tau * ||column of M||_2 dropped (or below tau with the absolute
/// rule), diagonal never dropped. tau = 0 yields the exact factor.
/// Throws NotPositiveDefiniteError with the failing column on breakdown.
LowerFactor ichol_threshold(const SparseMatrix& m, double tau,
                            DropRule rule = DropRule::relative);

struct IcholShifted {
    LowerFactor factor;
    double shift = 0.0;  // alpha actually applied to diag(M)
    int retries = 0;
};

/// Breakdown recovery: retries with diagonal shift alpha*diag(M), alpha
/// starting at 1e-3 and doubling, at most 10 retries.
IcholShifted ichol_with_shift(const SparseMatrix& m, double tau,
                              DropRule rule = DropRule::relative);

/// Exact Cholesky solver for a block-diagonal SPD matrix: the connected
/// components of the sparsity graph are factored densely (singletons reduce
/// to scalars). Built once, applied many times.
class BlockDiagCholesky {
public:
    explicit BlockDiagCholesky(const SparseMatrix& a, index_t max_dense_block = 8192);

    Vector solve(const Vector& b) const;

    index_t component_count() const { return static_cast<index_t>(blocks_.size()) + singleton_count_; }
    index_t largest_block() const { return largest_block_; }

private:
    struct Block {
        std::vector<index_t> idx;
        DenseMatrix chol;
    };
    index_t dim_ = 0;
    index_t singleton_count_ = 0;
    index_t largest_block_ = 1;
    Vector inv_scalar_;  // nonzero only on singleton rows
    std::vector<Block> blocks_;
};

}  // namespace dsp
