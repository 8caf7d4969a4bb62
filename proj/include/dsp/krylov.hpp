#pragma once

/// @file krylov.hpp
/// @brief Outer flexible GMRES and inner preconditioned CG with the
/// benchmark stopping rules.

#include <functional>

#include "dsp/types.hpp"

namespace dsp {

/// Matrix-free operator: deterministic for fixed state, output length dim.
struct LinearOperator {
    index_t dim = 0;
    std::function<Vector(const Vector&)> apply;

    static LinearOperator identity(index_t n) {
        return {n, [](const Vector& v) { return v; }};
    }
};

enum class SolveFlag { converged, maxit, breakdown };

struct KrylovResult {
    index_t iterations = 0;
    Vector solution;
    std::vector<double> rel_residual_history;  // one entry per iteration; the
                                               // final entry is a true residual
    double final_rel_residual = 0.0;
    double rel_error = -1.0;  // filled by callers that know w*; < 0 means absent
    double wall_time = 0.0;
    SolveFlag flag = SolveFlag::converged;
};

struct FgmresOptions {
    double tol = 1e-8;
    index_t maxit = 0;      // 0: min(dim, 500)
    bool reorthogonalize = false;  // second modified Gram-Schmidt pass
};

/// Right-preconditioned flexible GMRES, no restart, zero initial guess,
/// modified Gram-Schmidt + Givens least squares. Converges only on the true
/// residual ||b - A w||/||b|| evaluated on the reconstructed iterate.
KrylovResult fgmres(const LinearOperator& op, const LinearOperator& precond,
                    const Vector& b, const FgmresOptions& opts);

enum class PcgStop { true_residual, preconditioned_residual };

struct PcgOptions {
    double tol = 1e-6;
    index_t maxit = 200;
    PcgStop stop = PcgStop::true_residual;
};

/// Standard preconditioned CG for SPD operator and SPD preconditioner.
/// Throws IndefiniteOperatorError when p'Ap <= 0 is met.
KrylovResult pcg(const LinearOperator& op, const LinearOperator& precond,
                 const Vector& b, const PcgOptions& opts);

/// tol = 10 / N^2, the benchmark tolerance schedule.
double tolerance_schedule(index_t total_order);

}  // namespace dsp
