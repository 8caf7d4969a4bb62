#pragma once

/// @file bench.hpp
/// @brief Problem construction, single solves with recomputed metrics, and
/// the benchmark sweep that emits one CSV row per (size, preconditioner).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dsp/bounds.hpp"
#include "dsp/precond.hpp"
#include "dsp/problems.hpp"
#include "dsp/spectrum.hpp"
#include "dsp/system.hpp"

namespace dsp {

struct ProblemConfig {
    std::string kind = "ex1";  // ex1 | ex2 | file
    index_t p = 16;            // ex1
    index_t n = 100, m = 80, l = 60;  // ex2
    std::uint64_t seed = 1;           // ex2 system seed
    DFormulaVariant d_formula = DFormulaVariant::squared;
    std::string dir;  // file: directory holding A.mtx, B.mtx, C.mtx
};

BlockSaddleSystem build_problem(const ProblemConfig& cfg,
                                std::uint64_t* used_seed = nullptr);

struct SolveConfig {
    PreconditionerKind kind{PrecondTag::Q3plus, PrecondMode::inexact};
    RhsSpec rhs;
    double tol = 0.0;     // 0: the 10/N^2 schedule
    index_t maxit = 0;    // 0: min(N, 500)
    double inner_tol = 1e-4;
    index_t inner_maxit = 200;
    Block11 block11 = Block11::exact;
    BuildOptions build;
    bool reorthogonalize = false;
};

/// Preconditioner data shared across solves on one system.
struct PrecondContext {
    std::optional<ExactSchurSet> es;
    std::optional<ApproximationSet> ap;
};

/// Builds whichever side of the context the kind requires (idempotent).
void ensure_context(PrecondContext& ctx, const BlockSaddleSystem& sys,
                    const PreconditionerKind& kind, const BuildOptions& build);

struct SolveOutcome {
    KrylovResult result;
    double res = 0.0;  // ||b - A w|| / ||b|| recomputed from the assembled matrix
    double err = -1.0;  // ||w - w*|| / ||w*||, -1 when w* unknown
    double tol = 0.0;   // resolved tolerance
    ApplyStats stats;
};

SolveOutcome run_solve(const BlockSaddleSystem& sys, const SparseMatrix& assembled,
                       const Vector& b, const Vector* w_star,
                       PrecondContext& ctx, const SolveConfig& cfg);

struct BenchConfig {
    ProblemConfig problem;
    std::vector<index_t> p_list;  // ex1 sweep; ignored otherwise
    std::vector<PreconditionerKind> preconds;
    SolveConfig solve;  // kind field ignored; rhs.seed is the base seed
};

struct BenchRow {
    std::string problem;
    index_t p = 0;  // 0 when not an ex1 row
    index_t size = 0;
    std::string precond;
    std::string mode;
    std::string rhs;
    double tol = 0.0;
    index_t its = 0;
    std::string flag;
    double cpu_s = 0.0;
    double res = 0.0;
    double err = -1.0;
};

/// Runs every (size, preconditioner) pair; failures become flagged rows and
/// never abort the sweep.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

/// (re, im) rows with a header.
void write_spectrum_csv(std::ostream& out, const Spectrum& spec);

/// Stable-schema JSON bound report (gamma ranges, intervals, radii, counts,
/// pass flags, offending eigenvalues, metadata).
std::string bound_report_json(const BoundReport& rep, const std::string& problem,
                              const std::string& precond, double inner_tol,
                              const std::string& block11);

std::string to_string(SolveFlag flag);

}  // namespace dsp
