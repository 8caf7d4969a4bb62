// Command-line driver: problem generation, single solves, benchmark sweeps
// and spectral / bound reports for the double saddle-point preconditioners.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "dsp/bench.hpp"
#include "dsp/matrix_market.hpp"
#include "dsp/vec.hpp"

namespace {

using namespace dsp;

std::string out_path(const std::string& path) {
    if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
    const char* dir = std::getenv("DSP_OUT_DIR");
    if (!dir || !*dir) return path;
    return (std::filesystem::path(dir) / path).string();
}

struct ProblemFlags {
    std::string problem = "ex1";
    index_t p = 16;
    index_t n = 100, m = 80, l = 60;
    std::uint64_t seed = 1;
    std::string d_formula = "squared";
    std::string dir;

    void attach(CLI::App* cmd, bool with_p = true) {
        cmd->add_option("--problem", problem, "ex1 | ex2 | file")
            ->check(CLI::IsMember({"ex1", "ex2", "file"}));
        if (with_p) cmd->add_option("--p", p, "ex1 grid parameter (p >= 2)");
        cmd->add_option("--n", n, "ex2 first block size");
        cmd->add_option("--m", m, "ex2 second block size");
        cmd->add_option("--l", l, "ex2 third block size");
        cmd->add_option("--seed", seed, "ex2 system seed / random-rhs seed");
        cmd->add_option("--d-formula", d_formula,
                        "diagonal formula reading for ex1 (squared | literal)")
            ->check(CLI::IsMember({"squared", "literal"}));
        cmd->add_option("--dir", dir, "directory with A.mtx B.mtx C.mtx (problem=file)");
    }

    ProblemConfig config() const {
        ProblemConfig cfg;
        cfg.kind = problem;
        cfg.p = p;
        cfg.n = n;
        cfg.m = m;
        cfg.l = l;
        cfg.seed = seed;
        cfg.d_formula =
            d_formula == "literal" ? DFormulaVariant::literal : DFormulaVariant::squared;
        cfg.dir = dir;
        return cfg;
    }
};

struct SolveFlags {
    std::string precond = "qa";
    std::string mode = "inexact";
    std::string rhs = "ones";
    double tol = 0.0;
    index_t maxit = 0;
    double inner_tol = 1e-4;
    index_t inner_maxit = 200;
    std::string block11 = "exact";
    std::string ic_drop = "relative";
    double ic_tol = 1e-4;
    bool reorth = false;

    void attach(CLI::App* cmd, bool single_precond) {
        if (single_precond)
            cmd->add_option("--precond", precond,
                            "pd p1 p2 p3 q1 q2 q3 qa q4 qb q5 pasb");
        cmd->add_option("--mode", mode, "exact | inexact")
            ->check(CLI::IsMember({"exact", "inexact"}));
        cmd->add_option("--rhs", rhs, "ones | random")
            ->check(CLI::IsMember({"ones", "random"}));
        cmd->add_option("--tol", tol, "outer tolerance (default: 10/N^2)");
        cmd->add_option("--maxit", maxit, "outer iteration cap (default: min(N,500))");
        cmd->add_option("--inner-tol", inner_tol, "inner PCG tolerance");
        cmd->add_option("--inner-maxit", inner_maxit, "inner PCG iteration cap");
        cmd->add_option("--block11", block11, "(1,1) solves: exact | diag")
            ->check(CLI::IsMember({"exact", "diag"}));
        cmd->add_option("--ic-drop", ic_drop, "IC drop rule: relative | absolute")
            ->check(CLI::IsMember({"relative", "absolute"}));
        cmd->add_option("--ic-tol", ic_tol, "IC drop tolerance");
        cmd->add_flag("--reorth", reorth, "second Gram-Schmidt pass");
    }

    SolveConfig config(std::uint64_t rhs_seed) const {
        SolveConfig sc;
        sc.kind = {parse_precond_tag(precond),
                   mode == "exact" ? PrecondMode::exact : PrecondMode::inexact};
        sc.rhs = {rhs == "ones" ? RhsKind::unit_solution : RhsKind::random_solution,
                  rhs_seed};
        sc.tol = tol;
        sc.maxit = maxit;
        sc.inner_tol = inner_tol;
        sc.inner_maxit = inner_maxit;
        sc.block11 = block11 == "diag" ? Block11::hat : Block11::exact;
        sc.build.ic_drop_tol = ic_tol;
        sc.build.ic_rule = ic_drop == "absolute" ? DropRule::absolute : DropRule::relative;
        sc.reorthogonalize = reorth;
        return sc;
    }
};

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_gen(const ProblemFlags& pf, const std::string& out_dir) {
    std::uint64_t used_seed = 0;
    BlockSaddleSystem sys = build_problem(pf.config(), &used_seed);
    const std::filesystem::path dir = out_path(out_dir);
    std::filesystem::create_directories(dir);
    write_matrix_market_file((dir / "A.mtx").string(), sys.A, MmSymmetry::symmetric);
    write_matrix_market_file((dir / "B.mtx").string(), sys.B);
    write_matrix_market_file((dir / "C.mtx").string(), sys.C);

    nlohmann::json meta;
    meta["problem"] = pf.problem;
    if (pf.problem == "ex1") {
        meta["p"] = pf.p;
        meta["d_formula"] = pf.d_formula;
    }
    if (pf.problem == "ex2") {
        meta["seed"] = pf.seed;
        meta["seed_used"] = used_seed;
    }
    meta["n"] = sys.n;
    meta["m"] = sys.m;
    meta["l"] = sys.l;
    std::ofstream mf(dir / "meta.json");
    mf << meta.dump(2) << "\n";
    std::cout << "wrote " << (dir / "A.mtx").string() << " B.mtx C.mtx meta.json (order "
              << sys.order() << ")\n";
    return 0;
}

int cmd_solve(const ProblemFlags& pf, const SolveFlags& sf, const std::string& history,
              const std::string& dump_factors) {
    BlockSaddleSystem sys = build_problem(pf.config());
    SparseMatrix assembled = assemble_saddle(sys);
    SolveConfig sc = sf.config(pf.seed);
    RhsResult rhs = make_rhs(sys, sc.rhs);
    PrecondContext ctx;
    SolveOutcome out = run_solve(sys, assembled, rhs.b, &rhs.w_star, ctx, sc);

    if (!dump_factors.empty() && ctx.ap) {
        const std::filesystem::path dir = out_path(dump_factors);
        std::filesystem::create_directories(dir);
        write_matrix_market_file((dir / "Shat.mtx").string(), ctx.ap->s_hat,
                                 MmSymmetry::symmetric);
        write_matrix_market_file((dir / "L_S.mtx").string(), ctx.ap->l_s.L);
        write_matrix_market_file((dir / "X0.mtx").string(), ctx.ap->x0,
                                 MmSymmetry::symmetric);
        write_matrix_market_file((dir / "IC.mtx").string(), ctx.ap->ic.L);
    }
    if (!history.empty()) {
        std::ofstream hf(out_path(history));
        hf << "iteration,rel_residual\n";
        hf.precision(17);
        for (std::size_t k = 0; k < out.result.rel_residual_history.size(); ++k)
            hf << k + 1 << "," << out.result.rel_residual_history[k] << "\n";
    }

    std::cout << "precond=" << sf.precond << " mode=" << sf.mode
              << " N=" << sys.order() << " tol=" << out.tol
              << " its=" << out.result.iterations << " flag=" << to_string(out.result.flag)
              << " res=" << out.res << " err=" << out.err
              << " time=" << out.result.wall_time << "s\n";
    if (out.stats.inner_maxit_hits > 0)
        std::cerr << "warning: inner PCG hit maxit " << out.stats.inner_maxit_hits
                  << " times\n";
    return out.result.flag == SolveFlag::converged ? 0 : 2;
}

int cmd_bench(const ProblemFlags& pf, const SolveFlags& sf, const std::string& p_csv,
              const std::string& precond_csv, const std::string& out_file) {
    BenchConfig cfg;
    cfg.problem = pf.config();
    for (const std::string& tok : split_list(p_csv)) cfg.p_list.push_back(std::stoll(tok));
    const PrecondMode mode =
        sf.mode == "exact" ? PrecondMode::exact : PrecondMode::inexact;
    for (const std::string& tok : split_list(precond_csv))
        cfg.preconds.push_back({parse_precond_tag(tok), mode});
    if (cfg.preconds.empty()) throw DimensionError("bench: at least one preconditioner");
    cfg.solve = sf.config(pf.seed);

    std::vector<BenchRow> rows = run_bench(cfg);
    if (out_file.empty()) {
        write_bench_csv(std::cout, rows);
    } else {
        std::ofstream f(out_path(out_file));
        write_bench_csv(f, rows);
        std::cout << "wrote " << out_path(out_file) << " (" << rows.size() << " rows)\n";
    }
    for (const BenchRow& r : rows)
        if (r.flag.rfind("error", 0) == 0) return 3;
    return 0;
}

struct SpectrumFlags {
    std::string variant = "general";
    std::string side = "left";
    index_t max_order = 2500;
    int threads = 0;
    std::string out_csv;
    std::string report;

    void attach(CLI::App* cmd) {
        cmd->add_option("--variant", variant,
                         "general (diag/tridiag approximations) | simplified (Ahat = I)")
            ->check(CLI::IsMember({"general", "simplified"}));
        cmd->add_option("--side", side, "left (Q^{-1}A) | right (A Q^{-1})")
            ->check(CLI::IsMember({"left", "right"}));
        cmd->add_option("--max-order", max_order, "dense-spectrum size guard");
        cmd->add_option("--threads", threads, "column-formation threads (0: auto)");
    }
};

int cmd_spectrum(const ProblemFlags& pf, SolveFlags sf, const SpectrumFlags& spf,
                 bool bounds_only) {
    BlockSaddleSystem sys = build_problem(pf.config());
    if (sys.order() > spf.max_order) {
        std::cerr << "refusing: order " << sys.order() << " exceeds the dense guard "
                  << spf.max_order << " (raise --max-order if you have the memory)\n";
        return 4;
    }
    SpectrumOptions so;
    so.side = spf.side == "right" ? PrecondSide::right : PrecondSide::left;
    so.max_order = spf.max_order;
    so.threads = spf.threads;
    so.eig.residual_check = sys.order() <= 500;

    Spectrum sp;
    GammaRanges g;
    std::string block11_used = "n/a";
    if (spf.variant == "simplified") {
        SimplifiedSet ss = build_simplified(sys);
        sp = preconditioned_spectrum(sys, PrecondTag::Q3plus, ss, so);
        g = compute_gamma_ranges_simplified(sys, ss);
        sf.inner_tol = 0.0;  // direct solves
    } else if (sf.mode == "exact") {
        ExactSchurSet es = build_exact(sys);
        sp = preconditioned_spectrum(
            sys, {parse_precond_tag(sf.precond), PrecondMode::exact}, es, so);
        ApproximationSet ap = build_approximations(sys);
        g = compute_gamma_ranges(sys, ap);
    } else {
        // the bound analysis covers the operator whose (1,1) block is Ahat;
        // the inner solve is tightened so the applied operator is
        // effectively linear
        ApproximationSet ap = build_approximations(sys);
        ApplyOptions aopts;
        aopts.inner_tol = std::min(sf.inner_tol, 1e-12);
        aopts.inner_maxit = std::max<index_t>(sf.inner_maxit, 400);
        aopts.block11 = sf.block11 == "exact" ? Block11::exact : Block11::hat;
        block11_used = sf.block11 == "exact" ? "exact" : "diag";
        sp = preconditioned_spectrum(
            sys, {parse_precond_tag(sf.precond), PrecondMode::inexact}, ap, aopts, so);
        g = compute_gamma_ranges(sys, ap);
    }

    if (!spf.out_csv.empty()) {
        std::ofstream f(out_path(spf.out_csv));
        write_spectrum_csv(f, sp);
        std::cout << "wrote " << out_path(spf.out_csv) << " (" << sp.values.size()
                  << " eigenvalues)\n";
    } else if (!bounds_only) {
        write_spectrum_csv(std::cout, sp);
    }

    // the bound theory covers the triangular Qbar_3 preconditioner
    const bool bounds_apply =
        spf.variant == "simplified" || parse_precond_tag(sf.precond) == PrecondTag::Q3plus;
    if (!bounds_apply) {
        if (bounds_only) {
            std::cerr << "error: bound verification applies to --precond qa (Qbar_3) only\n";
            return 1;
        }
        return 0;
    }

    BoundReport rep = verify_bounds(
        sp, g,
        spf.variant == "simplified" ? BoundVariant::simplified : BoundVariant::general);
    const std::string json = bound_report_json(
        rep, pf.problem,
        sf.precond + "/" + (spf.variant == "simplified" ? "simplified" : sf.mode),
        sf.inner_tol, block11_used);
    if (!spf.report.empty()) {
        std::ofstream f(out_path(spf.report));
        f << json << "\n";
        std::cout << "wrote " << out_path(spf.report) << "\n";
    } else if (bounds_only) {
        std::cout << json << "\n";
    }
    std::cout << "real range [" << rep.real_min << ", " << rep.real_max
              << "], bound interval [" << rep.real_interval.lo << ", "
              << rep.real_interval.hi << "], all_pass=" << (rep.all_pass ? "yes" : "no")
              << "\n";
    return rep.all_pass ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"block preconditioners for 3x3 double saddle-point systems"};
    app.require_subcommand(1);

    ProblemFlags gen_pf;
    std::string gen_out = ".";
    CLI::App* gen = app.add_subcommand("gen", "generate a problem and write Matrix Market files");
    gen_pf.attach(gen);
    gen->add_option("--out", gen_out, "output directory");

    ProblemFlags solve_pf;
    SolveFlags solve_sf;
    std::string history, dump_factors;
    CLI::App* solve = app.add_subcommand("solve", "run one preconditioned FGMRES solve");
    solve_pf.attach(solve);
    solve_sf.attach(solve, true);
    solve->add_option("--history", history, "write residual history CSV");
    solve->add_option("--dump-factors", dump_factors, "dump Shat/L_S/X0/IC factors");

    ProblemFlags bench_pf;
    SolveFlags bench_sf;
    std::string p_csv = "16", precond_csv = "qa", bench_out;
    CLI::App* bench = app.add_subcommand("bench", "sweep sizes x preconditioners, emit CSV");
    bench_pf.attach(bench, /*with_p=*/false);
    bench_sf.attach(bench, false);
    bench->add_option("--p", p_csv, "comma-separated p list (ex1)");
    bench->add_option("--precond", precond_csv, "comma-separated preconditioner tags");
    bench->add_option("--out", bench_out, "output CSV path (default: stdout)");

    ProblemFlags spec_pf;
    SolveFlags spec_sf;
    SpectrumFlags spec_flags;
    CLI::App* spectrum = app.add_subcommand("spectrum", "dense preconditioned spectrum to CSV");
    spec_pf.attach(spectrum);
    spec_sf.attach(spectrum, true);
    spec_sf.block11 = "diag";
    spec_flags.attach(spectrum);
    spectrum->add_option("--out", spec_flags.out_csv, "eigenvalue CSV (re,im)");
    spectrum->add_option("--report", spec_flags.report, "also write the bound report JSON");

    ProblemFlags bounds_pf;
    SolveFlags bounds_sf;
    SpectrumFlags bounds_flags;
    CLI::App* bounds = app.add_subcommand("bounds", "gamma ranges + bound verification JSON");
    bounds_pf.attach(bounds);
    bounds_sf.attach(bounds, true);
    bounds_sf.block11 = "diag";
    bounds_flags.attach(bounds);
    bounds->add_option("--out", bounds_flags.report, "report JSON path (default: stdout)");
    bounds->add_option("--eigs", bounds_flags.out_csv, "also write the eigenvalue CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(gen_pf, gen_out);
        if (solve->parsed()) return cmd_solve(solve_pf, solve_sf, history, dump_factors);
        if (bench->parsed())
            return cmd_bench(bench_pf, bench_sf, p_csv, precond_csv, bench_out);
        if (spectrum->parsed()) return cmd_spectrum(spec_pf, spec_sf, spec_flags, false);
        if (bounds->parsed()) return cmd_spectrum(bounds_pf, bounds_sf, bounds_flags, true);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
