#include <doctest.h>

#include <cmath>

#include "dsp/factor.hpp"
#include "dsp/precond.hpp"
#include "dsp/problems.hpp"
#include "dsp/vec.hpp"
#include "test_support.hpp"

using namespace dsp;
using namespace dsp::testing;

TEST_CASE("chol_tridiag: forced 2x2 and identity") {
    SparseMatrix t = SparseMatrix::from_triplets(
        2, 2, {{0, 0, 4.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 5.0}});
    LowerFactor f = chol_tridiag(t);
    CHECK(f.kind == FactorKind::bidiagonal_cholesky);
    CHECK(f.L.coeff(0, 0) == 2.0);
    CHECK(f.L.coeff(1, 0) == 1.0);
    CHECK(f.L.coeff(1, 1) == 2.0);

    SparseMatrix eye = SparseMatrix::identity(7);
    LowerFactor fi = chol_tridiag(eye);
    CHECK(max_abs_diff(dense_of(fi.L), DenseMatrix::identity(7)) == 0.0);
}

TEST_CASE("chol_tridiag on the Shat actually built for p = 4: L L' reconstructs") {
    BlockSaddleSystem sys = gen_example1(4);
    ApproximationSet ap = build_approximations(sys);
    // bandwidth 1
    for (index_t i = 0; i < ap.l_s.L.rows(); ++i)
        for (index_t k = ap.l_s.L.row_ptr()[i]; k < ap.l_s.L.row_ptr()[i + 1]; ++k)
            CHECK(i - ap.l_s.L.col_idx()[k] <= 1);
    DenseMatrix ld = dense_of(ap.l_s.L);
    DenseMatrix rec = multiply(ld, transpose(ld));
    DenseMatrix t = dense_of(ap.s_hat);
    CHECK(max_abs_diff(rec, t) <= 1e-14 * max_abs(t));
}

TEST_CASE("chol_tridiag breakdown reports the pivot index") {
    SparseMatrix t = SparseMatrix::from_triplets(
        2, 2, {{0, 0, 1.0}, {0, 1, 3.0}, {1, 0, 3.0}, {1, 1, 1.0}});
    try {
        chol_tridiag(t);
        FAIL("expected NotPositiveDefiniteError");
    } catch (const NotPositiveDefiniteError& e) {
        CHECK(e.pivot_index == 1);
    }
    SparseMatrix notri = SparseMatrix::from_triplets(3, 3, {{0, 2, 1.0}});
    CHECK_THROWS_AS(chol_tridiag(notri), DimensionError);
}

TEST_CASE("chol_dense: diagonal, identity, and solve vs dense inverse") {
    DenseMatrix d(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 4.0;
    d(2, 2) = 9.0;
    DenseMatrix l = chol_dense(d);
    CHECK(l(0, 0) == 1.0);
    CHECK(l(1, 1) == 2.0);
    CHECK(l(2, 2) == 3.0);

    CHECK(max_abs_diff(chol_dense(DenseMatrix::identity(5)), DenseMatrix::identity(5)) == 0.0);

    Rng rng(31);
    DenseMatrix m = random_spd(50, rng);
    DenseMatrix lf = chol_dense(m);
    DenseMatrix rec = multiply(lf, transpose(lf));
    CHECK(max_abs_diff(rec, m) <= 1e-12 * max_abs(m));
    Vector b = rng.uniform_vector(50);
    Vector x = dense_chol_solve(lf, b);
    Vector oracle = dense_matvec(dense_inverse(m), b);
    Vector diff = subtract(x, oracle);
    CHECK(norm2(diff) <= 1e-9 * norm2(oracle));

    DenseMatrix indef(2, 2);
    indef(0, 0) = 1.0;
    indef(0, 1) = indef(1, 0) = 3.0;
    indef(1, 1) = 1.0;
    CHECK_THROWS_AS(chol_dense(indef), NotPositiveDefiniteError);
}

TEST_CASE("chol_dense blocked path matches on sizes beyond one block") {
    Rng rng(77);
    DenseMatrix m = random_spd(193, rng, 5.0);  // not a multiple of the block size
    DenseMatrix lf = chol_dense(m);
    DenseMatrix rec = multiply(lf, transpose(lf));
    CHECK(max_abs_diff(rec, m) <= 1e-12 * max_abs(m));
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t j = i + 1; j < m.cols(); ++j) CHECK(lf(i, j) == 0.0);
}

TEST_CASE("ichol_threshold tau = 0 is the exact factor") {
    SparseMatrix t = SparseMatrix::from_triplets(
        2, 2, {{0, 0, 4.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 5.0}});
    LowerFactor f = ichol_threshold(t, 0.0);
    CHECK(f.kind == FactorKind::exact_cholesky);
    CHECK(f.L.coeff(0, 0) == 2.0);
    CHECK(f.L.coeff(1, 0) == 1.0);
    CHECK(f.L.coeff(1, 1) == 2.0);

    Rng rng(5);
    DenseMatrix m = random_spd(20, rng);
    SparseMatrix ms = sparse_of(m);
    LowerFactor fl = ichol_threshold(ms, 0.0);
    DenseMatrix ld = dense_of(fl.L);
    DenseMatrix rec = multiply(ld, transpose(ld));
    CHECK(max_abs_diff(rec, m) <= 1e-10 * max_abs(m));
}

TEST_CASE("ichol_threshold: monotone fill and SPD operator") {
    BlockSaddleSystem sys = gen_example1(4);
    ApproximationSet ap = build_approximations(sys);
    const SparseMatrix& x0 = ap.x0;

    index_t prev_nnz = -1;
    for (double tau : {0.0, 1e-6, 1e-4, 1e-2, 1e-1}) {
        LowerFactor f = ichol_threshold(x0, tau);
        if (prev_nnz >= 0) CHECK(f.L.nnz() <= prev_nnz);
        prev_nnz = f.L.nnz();

        Rng rng(13);
        for (int trial = 0; trial < 5; ++trial) {
            Vector x = rng.uniform_vector(x0.rows());
            for (double& v : x) v -= 0.5;
            Vector lx = spmv(f.L, x, true);
            CHECK(dot(lx, lx) > 0.0);  // x'(LL')x = ||L'x||^2 > 0
        }
    }
}

TEST_CASE("ichol_threshold: relative vs absolute drop rules differ as expected") {
    BlockSaddleSystem sys = gen_example1(4);
    ApproximationSet ap = build_approximations(sys);
    LowerFactor rel = ichol_threshold(ap.x0, 1e-4, DropRule::relative);
    LowerFactor abs = ichol_threshold(ap.x0, 1e-4, DropRule::absolute);
    // both valid factors with positive diagonals
    for (index_t i = 0; i < rel.L.rows(); ++i) {
        CHECK(rel.L.coeff(i, i) > 0.0);
        CHECK(abs.L.coeff(i, i) > 0.0);
    }
}

TEST_CASE("ichol breakdown carries the column index; shifted retry recovers") {
    // indefinite matrix: breakdown at column 1
    SparseMatrix bad = SparseMatrix::from_triplets(
        2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 1.0}});
    try {
        ichol_threshold(bad, 0.0);
        FAIL("expected NotPositiveDefiniteError");
    } catch (const NotPositiveDefiniteError& e) {
        CHECK(e.pivot_index == 1);
    }
    // mildly indefinite: the geometric shift schedule recovers it
    SparseMatrix near_spd = SparseMatrix::from_triplets(
        2, 2, {{0, 0, 1.0}, {0, 1, 1.01}, {1, 0, 1.01}, {1, 1, 1.0}});
    IcholShifted shifted = ichol_with_shift(near_spd, 0.0);
    CHECK(shifted.retries > 0);
    CHECK(shifted.shift > 0.0);
    for (index_t i = 0; i < 2; ++i) CHECK(shifted.factor.L.coeff(i, i) > 0.0);
    // past the retry budget the breakdown still surfaces
    CHECK_THROWS_AS(ichol_with_shift(bad, 0.0), NotPositiveDefiniteError);
}

TEST_CASE("chol_tridiag never breaks down on the Shat matrices actually built (regression)") {
    for (index_t p : {2, 4, 8, 16}) {
        BlockSaddleSystem sys = gen_example1(p);
        ApproximationSet ap = build_approximations(sys);
        CHECK(ap.s_hat_shift == 0.0);  // no fallback shift was needed
        for (index_t i = 0; i < ap.l_s.L.rows(); ++i) CHECK(ap.l_s.L.coeff(i, i) > 0.0);
    }
}

TEST_CASE("BlockDiagCholesky: exact solves on block-diagonal SPD matrices") {
    Rng rng(101);
    // assemble blockdiag(random SPD 6x6, diag(3), random SPD 4x4)
    DenseMatrix b1 = random_spd(6, rng);
    DenseMatrix b2 = random_spd(4, rng);
    const index_t n = 6 + 3 + 4;
    DenseMatrix full(n, n);
    for (index_t i = 0; i < 6; ++i)
        for (index_t j = 0; j < 6; ++j) full(i, j) = b1(i, j);
    for (index_t i = 0; i < 3; ++i) full(6 + i, 6 + i) = 1.0 + rng.uniform();
    for (index_t i = 0; i < 4; ++i)
        for (index_t j = 0; j < 4; ++j) full(9 + i, 9 + j) = b2(i, j);
    SparseMatrix sp = sparse_of(full);

    BlockDiagCholesky solver(sp);
    CHECK(solver.largest_block() == 6);
    Vector b = rng.uniform_vector(n);
    Vector x = solver.solve(b);
    Vector oracle = dense_matvec(dense_inverse(full), b);
    Vector diff = subtract(x, oracle);
    CHECK(norm2(diff) <= 1e-10 * norm2(oracle));
}

TEST_CASE("BlockDiagCholesky handles the structured A (dense corner + diagonal tail)") {
    BlockSaddleSystem sys = gen_example1(8);
    BlockDiagCholesky solver(sys.A);
    Rng rng(55);
    Vector b = rng.uniform_vector(sys.n);
    Vector x = solver.solve(b);
    Vector back = spmv(sys.A, x);
    Vector diff = subtract(back, b);
    CHECK(norm2(diff) <= 1e-12 * norm2(b));
}
