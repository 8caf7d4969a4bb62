#pragma once

/// @file system.hpp
/// @brief The 3x3 block system container, its assembly, and right-hand sides.

#include <cstdint>
#include <optional>

#include "dsp/sparse.hpp"
#include "dsp/types.hpp"

namespace dsp {

/// Blocks of the double saddle-point matrix
///   [ A  B'  0 ]
///   [ B  0   C']
///   [ 0  C   0 ]
/// with A (n x n) SPD and B (m x n), C (l x m) of full row rank.
struct BlockSaddleSystem {
    SparseMatrix A;
    SparseMatrix B;
    SparseMatrix C;
    index_t n = 0;
    index_t m = 0;
    index_t l = 0;

    index_t order() const { return n + m + l; }
    void validate() const;  // block dimension consistency
};

/// Assembles the full (n+m+l)^2 sparse matrix.
SparseMatrix assemble_saddle(const BlockSaddleSystem& sys);

/// Block-wise y = [A B' 0; B 0 C'; 0 C 0] * w, bit-identical to the
/// assembled spmv (same per-row accumulation order).
Vector saddle_apply(const BlockSaddleSystem& sys, const Vector& w);

enum class RhsKind { unit_solution, random_solution };

struct RhsSpec {
    RhsKind kind = RhsKind::unit_solution;
    std::uint64_t seed = 0;  // used when kind == random_solution
};

struct RhsResult {
    Vector b;
    Vector w_star;
};

/// Selects the exact solution (all-ones or seeded uniform(0,1)) and computes
/// b so that the system has that known solution.
RhsResult make_rhs(const BlockSaddleSystem& sys, const RhsSpec& spec);

}  // namespace dsp
