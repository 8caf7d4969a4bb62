#include "dsp/bench.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "dsp/matrix_market.hpp"
#include "dsp/vec.hpp"

namespace dsp {

std::string to_string(SolveFlag flag) {
    switch (flag) {
        case SolveFlag::converged: return "converged";
        case SolveFlag::maxit: return "maxit";
        case SolveFlag::breakdown: return "breakdown";
    }
    return "?";
}

BlockSaddleSystem build_problem(const ProblemConfig& cfg, std::uint64_t* used_seed) {
    if (cfg.kind == "ex1") {
        Example1Options opts;
        opts.d_formula = cfg.d_formula;
        if (used_seed) *used_seed = 0;
        return gen_example1(cfg.p, opts);
    }
    if (cfg.kind == "ex2") return gen_example2(cfg.n, cfg.m, cfg.l, cfg.seed, used_seed);
    if (cfg.kind == "file") {
        BlockSaddleSystem sys;
        sys.A = read_matrix_market_file(cfg.dir + "/A.mtx");
        sys.B = read_matrix_market_file(cfg.dir + "/B.mtx");
        sys.C = read_matrix_market_file(cfg.dir + "/C.mtx");
        sys.n = sys.A.rows();
        sys.m = sys.B.rows();
        sys.l = sys.C.rows();
        sys.validate();
        if (used_seed) *used_seed = 0;
        return sys;
    }
    throw DimensionError("build_problem: unknown problem kind '" + cfg.kind + "'");
}

void ensure_context(PrecondContext& ctx, const BlockSaddleSystem& sys,
                    const PreconditionerKind& kind, const BuildOptions& build) {
    if (kind.mode == PrecondMode::exact) {
        if (!ctx.es) ctx.es = build_exact(sys);
    } else {
        if (!ctx.ap) ctx.ap = build_approximations(sys, build);
    }
}

SolveOutcome run_solve(const BlockSaddleSystem& sys, const SparseMatrix& assembled,
                       const Vector& b, const Vector* w_star,
                       PrecondContext& ctx, const SolveConfig& cfg) {
    ensure_context(ctx, sys, cfg.kind, cfg.build);

    SolveOutcome out;
    out.tol = cfg.tol > 0.0 ? cfg.tol : tolerance_schedule(sys.order());

    LinearOperator op{sys.order(),
                      [&assembled](const Vector& v) { return spmv(assembled, v); }};
    LinearOperator precond;
    if (cfg.kind.mode == PrecondMode::exact) {
        precond = make_exact_precond_operator(cfg.kind, *ctx.es, sys);
    } else {
        ApplyOptions aopts;
        aopts.inner_tol = cfg.inner_tol;
        aopts.inner_maxit = cfg.inner_maxit;
        aopts.block11 = cfg.block11;
        precond = make_inexact_precond_operator(cfg.kind, *ctx.ap, sys, aopts, &out.stats);
    }

    FgmresOptions fopts;
    fopts.tol = out.tol;
    fopts.maxit = cfg.maxit;
    fopts.reorthogonalize = cfg.reorthogonalize;
    out.result = fgmres(op, precond, b, fopts);

    // RES recomputed from the assembled matrix and returned iterate only
    Vector r = b;
    axpy(-1.0, spmv(assembled, out.result.solution), r);
    out.res = norm2(r) / norm2(b);
    if (w_star) {
        Vector d = subtract(out.result.solution, *w_star);
        out.err = norm2(d) / norm2(*w_star);
        out.result.rel_error = out.err;
    }
    return out;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    std::vector<BenchRow> rows;
    std::vector<ProblemConfig> instances;
    if (cfg.problem.kind == "ex1" && !cfg.p_list.empty()) {
        for (index_t p : cfg.p_list) {
            ProblemConfig pc = cfg.problem;
            pc.p = p;
            instances.push_back(pc);
        }
    } else {
        instances.push_back(cfg.problem);
    }

    for (const ProblemConfig& pc : instances) {
        BlockSaddleSystem sys;
        SparseMatrix assembled;
        RhsResult rhs;
        try {
            sys = build_problem(pc);
            assembled = assemble_saddle(sys);
            RhsSpec spec = cfg.solve.rhs;
            if (pc.kind == "ex1" && spec.kind == RhsKind::random_solution)
                spec.seed += static_cast<std::uint64_t>(pc.p);  // fresh draw per size
            rhs = make_rhs(sys, spec);
        } catch (const std::exception& e) {
            for (const PreconditionerKind& kind : cfg.preconds) {
                BenchRow row;
                row.problem = pc.kind;
                row.p = pc.kind == "ex1" ? pc.p : 0;
                row.precond = to_string(kind.tag);
                row.mode = kind.mode == PrecondMode::exact ? "exact" : "inexact";
                row.flag = std::string("error: ") + e.what();
                rows.push_back(row);
            }
            continue;
        }

        PrecondContext ctx;
        for (const PreconditionerKind& kind : cfg.preconds) {
            BenchRow row;
            row.problem = pc.kind;
            row.p = pc.kind == "ex1" ? pc.p : 0;
            row.size = sys.order();
            row.precond = to_string(kind.tag);
            row.mode = kind.mode == PrecondMode::exact ? "exact" : "inexact";
            row.rhs = cfg.solve.rhs.kind == RhsKind::unit_solution ? "ones" : "random";
            try {
                SolveConfig sc = cfg.solve;
                sc.kind = kind;
                const auto t0 = std::chrono::steady_clock::now();
                SolveOutcome out =
                    run_solve(sys, assembled, rhs.b, &rhs.w_star, ctx, sc);
                row.cpu_s = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
                row.tol = out.tol;
                row.its = out.result.iterations;
                row.flag = to_string(out.result.flag);
                row.res = out.res;
                row.err = out.err;
            } catch (const std::exception& e) {
                row.flag = std::string("error: ") + e.what();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out.precision(12);
    out << "problem,p,size,precond,mode,rhs,tol,its,flag,cpu_s,res,err\n";
    for (const BenchRow& r : rows) {
        out << r.problem << "," << r.p << "," << r.size << "," << r.precond << ","
            << r.mode << "," << r.rhs << "," << r.tol << "," << r.its << ","
            << r.flag << "," << r.cpu_s << "," << r.res << "," << r.err << "\n";
    }
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spec) {
    out.precision(17);
    out << "re,im\n";
    for (const auto& v : spec.values) out << v.real() << "," << v.imag() << "\n";
}

std::string bound_report_json(const BoundReport& rep, const std::string& problem,
                              const std::string& precond, double inner_tol,
                              const std::string& block11) {
    nlohmann::json j;
    j["problem"] = problem;
    j["preconditioner"] = precond;
    j["variant"] = rep.variant == BoundVariant::general ? "general" : "simplified";
    j["gamma"] = {{"a", {{"min", rep.gammas.a.min}, {"max", rep.gammas.a.max}}},
                  {"s", {{"min", rep.gammas.s.min}, {"max", rep.gammas.s.max}}},
                  {"x", {{"min", rep.gammas.x.min}, {"max", rep.gammas.x.max}}}};
    j["complex_radius"] = rep.complex_radius;
    j["ky0_radius"] = rep.ky0_radius;
    j["real_interval"] = {{"lo", rep.real_interval.lo}, {"hi", rep.real_interval.hi}};
    if (rep.synthetic_interval)
        j["synthetic_interval"] = {{"lo", rep.synthetic_interval->lo},
                                   {"hi", rep.synthetic_interval->hi}};
    if (rep.variant == BoundVariant::simplified) {
        j["lambda_plus_min"] = rep.lambda_plus_min;
        j["lambda_plus_max"] = rep.lambda_plus_max;
        j["gamma_min_half"] = rep.gammas.a.min / 2.0;
        j["gamma_max_plus_one"] = rep.gammas.a.max + 1.0;
    }
    j["assumption_one_in_gamma_a"] = rep.assumption_one_in_gamma_a;
    j["real_count"] = rep.real_count;
    j["complex_count"] = rep.complex_count;
    j["real_min"] = rep.real_min;
    j["real_max"] = rep.real_max;
    j["all_pass"] = rep.all_pass;
    nlohmann::json fails = nlohmann::json::array();
    for (const EigenvalueCheck& c : rep.checks) {
        if (!c.pass)
            fails.push_back({{"re", c.value.real()},
                             {"im", c.value.imag()},
                             {"is_real", c.is_real}});
    }
    j["failing_eigenvalues"] = fails;
    j["meta"] = {{"inner_tol", inner_tol},
                 {"block11", block11},
                 {"real_classification_rel_tol", 1e-8}};
    return j.dump(2);
}

}  // namespace dsp
