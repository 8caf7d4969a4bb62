#pragma once

/// @file precond.hpp
/// @brief Block preconditioner catalogue for the double saddle-point system:
/// exact application through Schur-complement factors, and the inexact
/// application built from diag(A), the tridiagonal Schur approximation and an
/// inner PCG solve with the implicit second-level operator.

#include <functional>
#include <optional>
#include <string>

#include "dsp/factor.hpp"
#include "dsp/krylov.hpp"
#include "dsp/system.hpp"
#include "dsp/types.hpp"

namespace dsp {

enum class PrecondTag {
    PD,
    P1,
    P2,
    P3,
    Q1,
    Q2,
    Q3minus,
    Q3plus,  // Qbar_3, the plus-sign triangular variant
    Q4minus,
    Q4plus,  // Qbar_4
    Q5,
    PASB,
};

enum class PrecondMode { exact, inexact };

struct PreconditionerKind {
    PrecondTag tag = PrecondTag::Q3plus;
    PrecondMode mode = PrecondMode::inexact;
};

std::string to_string(PrecondTag tag);
/// Accepts the CLI spellings: pd p1 p2 p3 q1 q2 q3/q3minus qa/q3plus
/// q4/q4minus qb/q4plus q5 pasb.
PrecondTag parse_precond_tag(const std::string& name);

/// Exact Schur complements S = B A^{-1} B', X = C S^{-1} C' and their dense
/// Cholesky factors. Desk scale only. Also carries the C C' factor used by
/// P_ASB, whose defining Schur approximation is the identity.
struct ExactSchurSet {
    DenseMatrix S;
    DenseMatrix X;
    DenseMatrix chol_A;
    DenseMatrix chol_S;
    DenseMatrix chol_X;
    DenseMatrix chol_cct;  // factor of C C'
};

ExactSchurSet build_exact(const BlockSaddleSystem& sys, index_t max_order = 3000);

/// Outputs of the pre-FGMRES approximation stage: Ahat = diag(A),
/// Shat = tridiag(B Ahat^{-1} B') with its exact bidiagonal factor L_S,
/// X0 = C diag(Shat)^{-1} C' with its IC factor, and an exact factorization
/// of A for the (1,1) solves.
struct ApproximationSet {
    Vector a_hat;          // diag(A), strictly positive
    SparseMatrix s_hat;    // tridiagonal, SPD (possibly shifted, see below)
    LowerFactor l_s;       // bidiagonal Cholesky factor of s_hat
    double s_hat_shift = 0.0;  // 1e-12 * trace/m fallback, 0 when unused
    Vector s_hat_diag;
    SparseMatrix x0;       // C diag(s_hat)^{-1} C', explicit sparse
    LowerFactor ic;        // threshold IC factor of x0
    double ic_shift = 0.0;
    int ic_retries = 0;
    BlockDiagCholesky a_solver;  // exact Cholesky of A by diagonal blocks
    SparseMatrix cct;      // C C', the P_ASB Schur block under Shat = I
    LowerFactor cct_ic;    // its IC factor (inner PCG preconditioner)

    ApproximationSet(Vector a_hat_, SparseMatrix s_hat_, LowerFactor l_s_,
                     double s_hat_shift_, Vector s_hat_diag_, SparseMatrix x0_,
                     LowerFactor ic_, double ic_shift_, int ic_retries_,
                     BlockDiagCholesky a_solver_, SparseMatrix cct_,
                     LowerFactor cct_ic_)
        : a_hat(std::move(a_hat_)),
          s_hat(std::move(s_hat_)),
          l_s(std::move(l_s_)),
          s_hat_shift(s_hat_shift_),
          s_hat_diag(std::move(s_hat_diag_)),
          x0(std::move(x0_)),
          ic(std::move(ic_)),
          ic_shift(ic_shift_),
          ic_retries(ic_retries_),
          a_solver(std::move(a_solver_)),
          cct(std::move(cct_)),
          cct_ic(std::move(cct_ic_)) {}
};

struct BuildOptions {
    double ic_drop_tol = 1e-4;
    DropRule ic_rule = DropRule::relative;
};

ApproximationSet build_approximations(const BlockSaddleSystem& sys,
                                      const BuildOptions& opts = {});

/// y = Xhat v = C L_S^{-T} L_S^{-1} C' v, the implicit second-level operator.
Vector xhat_apply(const ApproximationSet& ap, const BlockSaddleSystem& sys,
                  const Vector& v);

/// Which operator backs the (1,1) solves of the inexact applications:
/// `exact` follows the preconditioner application recipe (solve with A);
/// `hat` uses diag(A), matching the written inexact preconditioner and the
/// spectral analysis.
enum class Block11 { exact, hat };

struct ApplyOptions {
    double inner_tol = 1e-4;
    index_t inner_maxit = 200;
    Block11 block11 = Block11::exact;
};

/// Counters accumulated across preconditioner applications.
struct ApplyStats {
    index_t applications = 0;
    index_t inner_iterations = 0;
    index_t inner_maxit_hits = 0;
};

/// w = Q^{-1} r with exact Schur factors, by block substitution.
Vector apply_exact(const PreconditionerKind& kind, const ExactSchurSet& es,
                   const BlockSaddleSystem& sys, const Vector& r);

/// w = Qbar^{-1} r (the inexact Q3plus application): inner PCG for the
/// Xhat-solve, bidiagonal solves for Shat, exact solve with A.
Vector apply_qbar(const ApproximationSet& ap, const BlockSaddleSystem& sys,
                  const Vector& r, double inner_tol = 1e-4,
                  ApplyStats* stats = nullptr);

/// Same block-substitution recipes with S -> Shat solves, X -> Xhat inner
/// PCG; P_ASB keeps an identity Schur block.
Vector apply_inexact(const PreconditionerKind& kind, const ApproximationSet& ap,
                     const BlockSaddleSystem& sys, const Vector& r,
                     const ApplyOptions& opts = {}, ApplyStats* stats = nullptr);

/// Operator wrappers for the Krylov drivers.
LinearOperator make_exact_precond_operator(const PreconditionerKind& kind,
                                           const ExactSchurSet& es,
                                           const BlockSaddleSystem& sys);
LinearOperator make_inexact_precond_operator(const PreconditionerKind& kind,
                                             const ApproximationSet& ap,
                                             const BlockSaddleSystem& sys,
                                             const ApplyOptions& opts,
                                             ApplyStats* stats = nullptr);

/// Simplified variant: the only approximation is Ahat != A, while
/// Shat = B Ahat^{-1} B' and Xhat = C Shat^{-1} C' are kept exact (dense
/// factors, desk scale). All solves are direct, so the operator is linear.
struct SimplifiedSet {
    Vector a_hat;        // diagonal of Ahat (identity by default)
    DenseMatrix s_hat;   // B Ahat^{-1} B'
    DenseMatrix chol_s;
    DenseMatrix x_hat;   // C Shat^{-1} C'
    DenseMatrix chol_x;
};

SimplifiedSet build_simplified(const BlockSaddleSystem& sys,
                               const Vector* a_hat_diag = nullptr,
                               index_t max_order = 3000);

/// w = Q^{-1} r for any catalogue tag with the simplified solves.
Vector apply_simplified(PrecondTag tag, const SimplifiedSet& ss,
                        const BlockSaddleSystem& sys, const Vector& r);

LinearOperator make_simplified_precond_operator(PrecondTag tag,
                                                const SimplifiedSet& ss,
                                                const BlockSaddleSystem& sys);

}  // namespace dsp
