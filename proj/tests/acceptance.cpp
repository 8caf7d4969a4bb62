// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion, with per-check detail lines.
// Exit status is the number of failed criteria.
//
// Three subchecks are expected to fail and are reported with their analysis
// (see notes/decisions ledger outside the repo for the full derivations):
//   - criterion 2: the tol-1e-10 finite-termination caps are unattainable in
//     IEEE double for qa/q1/q2/q3 (attainable residual floor ~1e-9), and the
//     Q1 cap of 3 contradicts its actual degree-4 minimum polynomial;
//   - criterion 5: the reference bound interval [0.1342, 6.2110] is not
//     derivable from the gamma definitions in use (under which gamma_X = 1);
//   - criterion 6: the synthetic lower bound gamma_min/2 fails on draws with
//     gamma_min*(gamma_max+1) > 2 (Ky = 0 branch eigenvalues near
//     1/(gamma_A+1)); the sharp interval holds on every draw.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "dsp/bench.hpp"
#include "dsp/bounds.hpp"
#include "dsp/spectrum.hpp"
#include "dsp/vec.hpp"
#include "quad_oracle.hpp"
#include "test_support.hpp"

using namespace dsp;
using namespace dsp::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
    int id;
    std::string title;
    bool pass = true;
    std::vector<std::string> notes;
    double seconds = 0.0;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
    }
    void info(const std::string& what) { notes.push_back("  info " + what); }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

bool within(double value, double target, double rel) {
    return std::abs(value - target) <= rel * std::abs(target);
}

Criterion criterion1() {
    Criterion c;
    c.id = 1;
    c.title = "exact spectra match the reference eigenvalue sets to 1e-8 (p = 2, 4)";
    const auto t0 = Clock::now();
    const double s3 = std::sqrt(3.0) / 2.0;
    struct Case {
        const char* tag;
        std::vector<std::complex<double>> set;
    };
    const std::vector<Case> cases = {
        {"q1", {{1, 0}, {0.5, s3}, {0.5, -s3}}},
        {"q5", {{1, 0}, {0.5, s3}, {0.5, -s3}}},
        {"q2", {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}},
        {"q3", {{1, 0}, {-1, 0}}},
        {"q4", {{1, 0}, {-1, 0}}},
        {"qa", {{1, 0}}},
        {"qb", {{1, 0}}},
    };
    c.info("spectra computed with the quad-precision instrument; the double path is");
    c.info("conditioning-limited to eps^(1/k) on the defective variants (unit-tested)");
    for (index_t p : {2, 4}) {
        BlockSaddleSystem sys = gen_example1(p);
        for (const Case& cs : cases) {
            auto vals = quad_precond_spectrum(sys, parse_precond_tag(cs.tag));
            double worst = 0.0;
            for (auto v : vals) {
                double best = 1e300;
                for (auto s : cs.set) best = std::min(best, std::abs(v - s));
                worst = std::max(worst, best);
            }
            c.check(worst <= 1e-8, std::string(cs.tag) + " p=" + fmt(double(p)) +
                                       ": max distance to reference set = " + fmt(worst));
            if (std::string(cs.tag) == "q2") {
                bool minus_one = false;
                for (auto v : vals)
                    if (std::abs(v - std::complex<double>(-1, 0)) < 1e-8) minus_one = true;
                c.check(minus_one, "q2: -1 present (kernel condition holds, m > l)");
            }
        }
    }
    c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    c.check(c.seconds < 10.0, "runtime " + fmt(c.seconds) + " s < 10 s");
    return c;
}

Criterion criterion2() {
    Criterion c;
    c.id = 2;
    c.title = "finite-termination caps, exact mode, tol 1e-10";
    const auto t0 = Clock::now();
    struct Cap {
        const char* tag;
        index_t cap;
    };
    const std::vector<Cap> caps = {{"qb", 2}, {"qa", 3}, {"q1", 3}, {"q5", 3},
                                   {"q2", 4}, {"q3", 4}, {"q4", 4}};
    for (index_t p : {2, 4}) {
        BlockSaddleSystem sys = gen_example1(p);
        SparseMatrix assembled = assemble_saddle(sys);
        ExactSchurSet es = build_exact(sys);
        RhsResult rhs = make_rhs(sys, {RhsKind::unit_solution, 0});
        LinearOperator op{sys.order(),
                          [&assembled](const Vector& v) { return spmv(assembled, v); }};
        for (const Cap& cap : caps) {
            PreconditionerKind kind{parse_precond_tag(cap.tag), PrecondMode::exact};
            LinearOperator pre = make_exact_precond_operator(kind, es, sys);
            FgmresOptions fo;
            fo.tol = 1e-10;
            KrylovResult r = fgmres(op, pre, rhs.b, fo);
            const bool ok = r.flag == SolveFlag::converged && r.iterations <= cap.cap;
            c.check(ok, std::string(cap.tag) + " p=" + fmt(double(p)) + ": its=" +
                            fmt(double(r.iterations)) + " (cap " + fmt(double(cap.cap)) +
                            "), final residual " + fmt(r.final_rel_residual));
            // supplementary: the caps at the attainable tolerance 1e-6, with
            // Q1 at its corrected cap 4 (its minimum polynomial has degree 4)
            FgmresOptions fa;
            fa.tol = 1e-6;
            KrylovResult ra = fgmres(op, pre, rhs.b, fa);
            const index_t corrected =
                std::string(cap.tag) == "q1" ? 4 : cap.cap;
            c.info(std::string(cap.tag) + " p=" + fmt(double(p)) +
                   " at attainable tol 1e-6: its=" + fmt(double(ra.iterations)) +
                   (ra.iterations <= corrected ? " within" : " OUTSIDE") +
                   " the corrected cap " + fmt(double(corrected)));
        }
    }
    c.info("expected failures: the attainable true-residual floor of double-precision");
    c.info("right-preconditioned FGMRES on these instances is ~4e-10..3e-9 (||Q^{-1}||~1e5),");
    c.info("and Q1's minimum polynomial has degree 4, not 3, so its cap of 3 is wrong;");
    c.info("quad-subspace least squares confirms no basis reaches 1e-10 (see ledger)");
    c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return c;
}

Criterion criterion3() {
    Criterion c;
    c.id = 3;
    c.title = "reference iteration counts, unit solution, tol 10/N^2, +-20%";
    const auto t0 = Clock::now();
    struct Row {
        const char* tag;
        double its[3];  // p = 16, 32, 64
    };
    const std::vector<Row> rows = {{"qa", {30, 44, 46}}, {"q5", {38, 57, 59}},
                                   {"pd", {79, 126, 132}}, {"p3", {51, 83, 87}},
                                   {"q2", {66, 98, 100}},  {"q4", {48, 81, 85}}};
    const index_t ps[3] = {16, 32, 64};
    for (int k = 0; k < 3; ++k) {
        BlockSaddleSystem sys = gen_example1(ps[k]);
        SparseMatrix assembled = assemble_saddle(sys);
        RhsResult rhs = make_rhs(sys, {RhsKind::unit_solution, 0});
        PrecondContext ctx;
        for (const Row& row : rows) {
            SolveConfig sc;
            sc.kind = {parse_precond_tag(row.tag), PrecondMode::inexact};
            SolveOutcome out = run_solve(sys, assembled, rhs.b, &rhs.w_star, ctx, sc);
            const bool ok = out.result.flag == SolveFlag::converged &&
                            within(double(out.result.iterations), row.its[k], 0.2) &&
                            out.res <= out.tol;
            c.check(ok, std::string(row.tag) + " p=" + fmt(double(ps[k])) + ": its=" +
                            fmt(double(out.result.iterations)) + " (reference " +
                            fmt(row.its[k]) + "), res=" + fmt(out.res));
        }
    }
    c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    c.check(c.seconds < 300.0, "runtime " + fmt(c.seconds) + " s < 5 min");
    return c;
}

Criterion criterion4() {
    Criterion c;
    c.id = 4;
    c.title = "reference iteration counts, random solution, +-20%";
    const auto t0 = Clock::now();
    struct Row {
        const char* tag;
        double its[3];
    };
    const std::vector<Row> rows = {{"qa", {33, 51, 54}}, {"q5", {43, 66, 69}}};
    const index_t ps[3] = {16, 32, 64};
    for (int k = 0; k < 3; ++k) {
        BlockSaddleSystem sys = gen_example1(ps[k]);
        SparseMatrix assembled = assemble_saddle(sys);
        RhsResult rhs = make_rhs(sys, {RhsKind::random_solution, 1 + std::uint64_t(ps[k])});
        PrecondContext ctx;
        for (const Row& row : rows) {
            SolveConfig sc;
            sc.kind = {parse_precond_tag(row.tag), PrecondMode::inexact};
            sc.rhs = {RhsKind::random_solution, 1 + std::uint64_t(ps[k])};
            SolveOutcome out = run_solve(sys, assembled, rhs.b, &rhs.w_star, ctx, sc);
            const bool ok = out.result.flag == SolveFlag::converged &&
                            within(double(out.result.iterations), row.its[k], 0.2);
            c.check(ok, std::string(row.tag) + " p=" + fmt(double(ps[k])) + ": its=" +
                            fmt(double(out.result.iterations)) + " (reference " +
                            fmt(row.its[k]) + ")");
        }
    }
    c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return c;
}

Criterion criterion5() {
    Criterion c;
    c.id = 5;
    c.title = "general-variant bound check at p = 16, inexact Qbar_3";
    const auto t0 = Clock::now();
    BlockSaddleSystem sys = gen_example1(16);
    ApproximationSet ap = build_approximations(sys);
    GammaRanges g = compute_gamma_ranges(sys, ap);
    ApplyOptions aopts;
    aopts.inner_tol = 1e-12;
    aopts.inner_maxit = 400;
    aopts.block11 = Block11::hat;
    SpectrumOptions so;
    so.threads = 0;
    so.eig.residual_check = false;
    Spectrum sp = preconditioned_spectrum(sys, {PrecondTag::Q3plus, PrecondMode::inexact},
                                          ap, aopts, so);
    BoundReport rep = verify_bounds(sp, g, BoundVariant::general);

    bool cplx_ok = true;
    for (const auto& chk : rep.checks)
        if (!chk.is_real)
            cplx_ok = cplx_ok &&
                      std::abs(chk.value - std::complex<double>(1.0, 0.0)) < 1.0 + 1e-9;
    c.check(cplx_ok, "all " + fmt(double(rep.complex_count)) +
                         " complex eigenvalues satisfy |lambda - 1| < 1");
    c.check(within(rep.real_min, 0.1982, 0.02) && within(rep.real_max, 3.0019, 0.02),
            "real range [" + fmt(rep.real_min) + ", " + fmt(rep.real_max) +
                "] within 2% of [0.1982, 3.0019]");
    const bool interval_match =
        within(rep.real_interval.lo, 0.1342, 0.01) && within(rep.real_interval.hi, 6.2110, 0.01);
    c.check(interval_match, "bound interval [" + fmt(rep.real_interval.lo) + ", " +
                                fmt(rep.real_interval.hi) +
                                "] within 1% of the reference [0.1342, 6.2110]");
    if (!interval_match) {
        c.info("expected failure: under the stated gamma definitions Xhat == Xtilde");
        c.info("exactly, so gamma_X = [1,1] and the synthetic interval is [" +
               fmt(rep.real_interval.lo) + ", " + fmt(rep.real_interval.hi) +
               "]; no natural pencil substitution reproduces the reference endpoints");
        c.info("(gamma_A = [" + fmt(g.a.min) + ", " + fmt(g.a.max) + "], gamma_S = [" +
               fmt(g.s.min) + ", " + fmt(g.s.max) + "]); containment still holds:");
    }
    bool reals_in = true;
    for (const auto& chk : rep.checks)
        if (chk.is_real) reals_in = reals_in && chk.pass;
    c.check(reals_in, "all " + fmt(double(rep.real_count)) +
                          " real eigenvalues inside the computed bound interval");
    c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    c.check(c.seconds < 600.0, "runtime " + fmt(c.seconds) + " s < 10 min (dense order 2080)");
    return c;
}

Criterion criterion6() {
    Criterion c;
    c.id = 6;
    c.title = "simplified-variant property suite over 20 seeds of the random problem";
    const auto t0 = Clock::now();
    c.check(std::abs(lambda_plus(1.0) - 1.0) <= 1e-12,
            "lambda_plus(1) = 1 to 1e-12 (got " + fmt(lambda_plus(1.0)) + ")");
    int sharp_fail = 0, synth_fail = 0, cplx_fail = 0, synth_invalid = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        BlockSaddleSystem sys = gen_example2(100, 80, 60, seed);
        SimplifiedSet ss = build_simplified(sys);
        GammaRanges g = compute_gamma_ranges_simplified(sys, ss);
        SpectrumOptions so;
        so.threads = 0;
        so.eig.residual_check = false;
        Spectrum sp = preconditioned_spectrum(sys, PrecondTag::Q3plus, ss, so);
        BoundReport rep = verify_bounds(sp, g, BoundVariant::simplified);
        const double slack = 1e-8 * std::max(1.0, rep.real_interval.hi);
        bool sharp_ok = true, synth_ok = true, cplx_ok = true;
        for (const auto& chk : rep.checks) {
            if (chk.is_real) {
                sharp_ok = sharp_ok && rep.real_interval.contains(chk.value.real(), slack);
                synth_ok = synth_ok && rep.synthetic_interval->contains(chk.value.real(), slack);
            } else {
                cplx_ok = cplx_ok &&
                          std::abs(chk.value - std::complex<double>(1.0, 0.0)) < 1.0 + 1e-9;
            }
        }
        sharp_fail += sharp_ok ? 0 : 1;
        synth_fail += synth_ok ? 0 : 1;
        cplx_fail += cplx_ok ? 0 : 1;
        if (g.a.min * (g.a.max + 1.0) > 2.0) ++synth_invalid;
        if (!synth_ok)
            c.info("seed " + fmt(double(seed)) + ": synthetic bound violated; gamma_min*(gamma_max+1) = " +
                   fmt(g.a.min * (g.a.max + 1.0)) + " > 2 (the proof's implicit condition)");
    }
    c.check(sharp_fail == 0, "sharp interval holds on all 20 seeds");
    c.check(synth_fail == 0, "synthetic interval holds on all 20 seeds (" +
                                 fmt(double(synth_fail)) + " violations)");
    if (synth_fail > 0) {
        c.info("expected failure: the simplified synthetic lower bound gamma_min/2 misses");
        c.info("the Ky=0 quadratic-branch eigenvalues (~1/(gamma_A+1)) whenever");
        c.info("gamma_min*(gamma_max+1) > 2; " + fmt(double(synth_invalid)) +
               " of 20 draws violate that condition (quad-verified real eigenvalues)");
    }
    c.check(cplx_fail == 0, "all complex eigenvalues in the unit disc at (1,0), every seed");
    c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    c.check(c.seconds < 120.0, "runtime " + fmt(c.seconds) + " s < 2 min");
    return c;
}

Criterion criterion7() {
    Criterion c;
    c.id = 7;
    c.title = "oracle equivalences";
    const auto t0 = Clock::now();

    // apply_qbar at inner_tol 1e-12 vs the densely assembled inverse, p = 4
    {
        BlockSaddleSystem sys = gen_example1(4);
        ApproximationSet ap = build_approximations(sys);
        const index_t n = sys.n, m = sys.m, l = sys.l, total = sys.order();
        DenseMatrix q(total, total);
        DenseMatrix ad = DenseMatrix::from_sparse(sys.A);
        for (index_t i = 0; i < n; ++i)
            for (index_t j = 0; j < n; ++j) q(i, j) = ad(i, j);
        DenseMatrix bt = transpose(DenseMatrix::from_sparse(sys.B));
        for (index_t i = 0; i < n; ++i)
            for (index_t j = 0; j < m; ++j) q(i, n + j) = bt(i, j);
        DenseMatrix sh = DenseMatrix::from_sparse(ap.s_hat);
        for (index_t i = 0; i < m; ++i)
            for (index_t j = 0; j < m; ++j) q(n + i, n + j) = -sh(i, j);
        DenseMatrix ct = transpose(DenseMatrix::from_sparse(sys.C));
        for (index_t i = 0; i < m; ++i)
            for (index_t j = 0; j < l; ++j) q(n + i, n + m + j) = ct(i, j);
        Vector unit(static_cast<std::size_t>(l), 0.0);
        for (index_t j = 0; j < l; ++j) {
            unit[static_cast<std::size_t>(j)] = 1.0;
            Vector col = xhat_apply(ap, sys, unit);
            for (index_t i = 0; i < l; ++i)
                q(n + m + i, n + m + j) = col[static_cast<std::size_t>(i)];
            unit[static_cast<std::size_t>(j)] = 0.0;
        }
        DenseMatrix qinv = dense_inverse(q);
        Rng rng(4242);
        double worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            Vector r = rng.uniform_vector(total);
            Vector got = apply_qbar(ap, sys, r, 1e-12);
            Vector oracle = multiply(qinv, r);
            Vector diff = subtract(got, oracle);
            worst = std::max(worst, norm2(diff) / norm2(oracle));
        }
        c.check(worst <= 1e-8,
                "apply_qbar(inner_tol 1e-12) vs dense assembled inverse, p=4: rel diff " +
                    fmt(worst));
    }

    // factor reconstructions
    {
        BlockSaddleSystem sys = gen_example1(4);
        ApproximationSet ap = build_approximations(sys);
        DenseMatrix ld = DenseMatrix::from_sparse(ap.l_s.L);
        DenseMatrix rec = multiply(ld, transpose(ld));
        DenseMatrix t = DenseMatrix::from_sparse(ap.s_hat);
        c.check(max_abs_diff(rec, t) <= 1e-14 * max_abs(t),
                "chol_tridiag: L L' reconstructs Shat to 1e-14 (p=4)");

        Rng rng(5);
        DenseMatrix g = DenseMatrix(20, 20);
        for (index_t i = 0; i < 20; ++i)
            for (index_t j = 0; j < 20; ++j) g(i, j) = 2.0 * rng.uniform() - 1.0;
        DenseMatrix spd = multiply(transpose(g), g);
        for (index_t i = 0; i < 20; ++i) spd(i, i) += 1.0;
        std::vector<Triplet> ts;
        for (index_t i = 0; i < 20; ++i)
            for (index_t j = 0; j < 20; ++j) ts.push_back({i, j, spd(i, j)});
        SparseMatrix spds = SparseMatrix::from_triplets(20, 20, std::move(ts));
        LowerFactor ic0 = ichol_threshold(spds, 0.0);
        DenseMatrix icd = DenseMatrix::from_sparse(ic0.L);
        DenseMatrix icrec = multiply(icd, transpose(icd));
        c.check(max_abs_diff(icrec, spd) <= 1e-10 * max_abs(spd),
                "ichol_threshold(tau=0): exact Cholesky of a random SPD 20x20");

        DenseMatrix lf = chol_dense(spd);
        DenseMatrix drec = multiply(lf, transpose(lf));
        c.check(max_abs_diff(drec, spd) <= 1e-12 * max_abs(spd),
                "chol_dense: L L' reconstructs to 1e-12");
    }

    // eig_dense vs the characteristic-polynomial oracle on random 6x6
    {
        Rng rng(99);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            DenseMatrix mt(6, 6);
            for (index_t i = 0; i < 6; ++i)
                for (index_t j = 0; j < 6; ++j) mt(i, j) = 2.0 * rng.uniform() - 1.0;
            Spectrum s = eig_dense(mt);
            auto oracle = poly_roots(char_poly(mt));
            worst = std::max(worst, spectrum_match_error(s.values, oracle));
        }
        c.check(worst <= 1e-6,
                "eig_dense vs characteristic-polynomial roots, 6x6: max diff " + fmt(worst));
    }
    c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return c;
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    results.push_back(criterion1());
    results.push_back(criterion2());
    results.push_back(criterion3());
    results.push_back(criterion4());
    results.push_back(criterion5());
    results.push_back(criterion6());
    results.push_back(criterion7());

    int failed = 0;
    for (const Criterion& c : results) {
        std::printf("[%s] criterion %d: %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", c.id,
                    c.title.c_str(), c.seconds);
        for (const std::string& note : c.notes) std::printf("%s\n", note.c_str());
        failed += c.pass ? 0 : 1;
    }
    std::printf("[INFO] criterion 8: CPU-time parity with the reference tables is not a "
                "target (different hardware); p = 512/1024 rows are not desk-scale "
                "targets\n");
    std::printf("%d of 7 checked criteria passed\n", 7 - failed);
    return failed;
}
