#include "dsp/precond.hpp"

#include <algorithm>
#include <cmath>

#include "dsp/vec.hpp"

namespace dsp {

std::string to_string(PrecondTag tag) {
    switch (tag) {
        case PrecondTag::PD: return "pd";
        case PrecondTag::P1: return "p1";
        case PrecondTag::P2: return "p2";
        case PrecondTag::P3: return "p3";
        case PrecondTag::Q1: return "q1";
        case PrecondTag::Q2: return "q2";
        case PrecondTag::Q3minus: return "q3minus";
        case PrecondTag::Q3plus: return "qa";
        case PrecondTag::Q4minus: return "q4minus";
        case PrecondTag::Q4plus: return "qb";
        case PrecondTag::Q5: return "q5";
        case PrecondTag::PASB: return "pasb";
    }
    return "?";
}

PrecondTag parse_precond_tag(const std::string& name) {
    if (name == "pd") return PrecondTag::PD;
    if (name == "p1") return PrecondTag::P1;
    if (name == "p2") return PrecondTag::P2;
    if (name == "p3") return PrecondTag::P3;
    if (name == "q1") return PrecondTag::Q1;
    if (name == "q2") return PrecondTag::Q2;
    if (name == "q3" || name == "q3minus") return PrecondTag::Q3minus;
    if (name == "qa" || name == "q3plus") return PrecondTag::Q3plus;
    if (name == "q4" || name == "q4minus") return PrecondTag::Q4minus;
    if (name == "qb" || name == "q4plus") return PrecondTag::Q4plus;
    if (name == "q5") return PrecondTag::Q5;
    if (name == "pasb") return PrecondTag::PASB;
    throw DimensionError("unknown preconditioner tag '" + name + "'");
}

namespace {

/// The three block solves a recipe is built from. Exact and inexact modes
/// differ only in what stands behind these.
struct BlockSolvers {
    std::function<Vector(const Vector&)> solve_a;
    std::function<Vector(const Vector&)> solve_s;
    std::function<Vector(const Vector&)> solve_x;
};

Vector negate(Vector v) {
    for (double& x : v) x = -x;
    return v;
}

/// w = Q^{-1} r by block forward/backward substitution. With exact solves the
/// recipes invert the catalogue matrices exactly; P3 and Q4/Q5 use the block
/// LU of the leading 2x2 saddle block, whose inner Schur complement
/// S + B A^{-1} B' collapses to 2S in the exact case.
Vector apply_with_solvers(PrecondTag tag, const BlockSolvers& bs,
                          const BlockSaddleSystem& sys, const Vector& r) {
    const index_t n = sys.n, m = sys.m, l = sys.l;
    Vector r1, r2, r3;
    split3(r, n, m, l, r1, r2, r3);
    Vector w1, w2, w3;

    auto leading_saddle = [&](const Vector& rhs1, const Vector& rhs2, double s_scale) {
        // [A B'; B 0] (w1; w2) = (rhs1; rhs2) via w2 = (s_scale*S)^{-1}(B A^{-1} rhs1 - rhs2)
        Vector t = spmv(sys.B, bs.solve_a(rhs1));
        axpy(-1.0, rhs2, t);
        w2 = bs.solve_s(t);
        if (s_scale != 1.0) scale(1.0 / s_scale, w2);
        Vector y = rhs1;
        spmv_add(sys.B, w2, -1.0, y, /*transpose=*/true);
        w1 = bs.solve_a(y);
    };

    switch (tag) {
        case PrecondTag::PD:
            w1 = bs.solve_a(r1);
            w2 = bs.solve_s(r2);
            w3 = bs.solve_x(r3);
            break;
        case PrecondTag::P1:
        case PrecondTag::P2: {
            w1 = bs.solve_a(r1);
            w3 = tag == PrecondTag::P1 ? negate(bs.solve_x(r3)) : bs.solve_x(r3);
            Vector t = spmv(sys.B, w1);
            spmv_add(sys.C, w3, 1.0, t, /*transpose=*/true);
            axpy(-1.0, r2, t);
            w2 = bs.solve_s(t);
            break;
        }
        case PrecondTag::P3:
            leading_saddle(r1, r2, 2.0);
            w3 = negate(bs.solve_x(r3));
            break;
        case PrecondTag::Q1: {
            w3 = bs.solve_x(r3);
            w2 = negate(bs.solve_s(r2));
            Vector y = r1;
            spmv_add(sys.B, w2, -1.0, y, /*transpose=*/true);
            w1 = bs.solve_a(y);
            break;
        }
        case PrecondTag::Q2: {
            w3 = negate(bs.solve_x(r3));
            Vector t = r2;
            spmv_add(sys.C, w3, -1.0, t, /*transpose=*/true);
            w2 = bs.solve_s(t);
            Vector y = r1;
            spmv_add(sys.B, w2, -1.0, y, /*transpose=*/true);
            w1 = bs.solve_a(y);
            break;
        }
        case PrecondTag::Q3minus:
        case PrecondTag::Q3plus: {
            w3 = bs.solve_x(r3);
            if (tag == PrecondTag::Q3minus) w3 = negate(std::move(w3));
            Vector t = spmv(sys.C, w3, /*transpose=*/true);
            axpy(-1.0, r2, t);
            w2 = bs.solve_s(t);
            Vector y = r1;
            spmv_add(sys.B, w2, -1.0, y, /*transpose=*/true);
            w1 = bs.solve_a(y);
            break;
        }
        case PrecondTag::Q4minus:
        case PrecondTag::Q4plus: {
            leading_saddle(r1, r2, 1.0);
            Vector t = r3;
            spmv_add(sys.C, w2, -1.0, t);
            w3 = bs.solve_x(t);
            if (tag == PrecondTag::Q4minus) w3 = negate(std::move(w3));
            break;
        }
        case PrecondTag::Q5:
            leading_saddle(r1, r2, 1.0);
            w3 = bs.solve_x(r3);
            break;
        case PrecondTag::PASB: {
            // [[A, B', 0], [0, I, C'], [0, 0, CC']]: the cited block upper
            // triangular preconditioner with its Schur block replaced by the
            // identity, so the (3,3) block C Shat^{-1} C' collapses to CC'.
            // solve_x is wired to the CC' solve for this tag.
            w3 = bs.solve_x(r3);
            w2 = r2;
            spmv_add(sys.C, w3, -1.0, w2, /*transpose=*/true);
            Vector y = r1;
            spmv_add(sys.B, w2, -1.0, y, /*transpose=*/true);
            w1 = bs.solve_a(y);
            break;
        }
    }
    return join3(w1, w2, w3);
}

}  // namespace

ExactSchurSet build_exact(const BlockSaddleSystem& sys, index_t max_order) {
    sys.validate();
    if (sys.order() > max_order)
        throw DimensionError("build_exact: system exceeds the desk-scale guard");
    const index_t n = sys.n, m = sys.m, l = sys.l;

    ExactSchurSet es;
    es.chol_A = chol_dense(DenseMatrix::from_sparse(sys.A));

    // S = B A^{-1} B'
    const DenseMatrix bd = DenseMatrix::from_sparse(sys.B);
    DenseMatrix z(n, m);
    {
        Vector col(static_cast<std::size_t>(n));
        for (index_t j = 0; j < m; ++j) {
            for (index_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = bd(j, i);
            Vector s = dense_chol_solve(es.chol_A, col);
            for (index_t i = 0; i < n; ++i) z(i, j) = s[static_cast<std::size_t>(i)];
        }
    }
    es.S = multiply(bd, z);
    for (index_t i = 0; i < m; ++i)
        for (index_t j = 0; j < i; ++j) {
            const double v = 0.5 * (es.S(i, j) + es.S(j, i));
            es.S(i, j) = es.S(j, i) = v;
        }
    es.chol_S = chol_dense(es.S);

    // X = C S^{-1} C'
    const DenseMatrix cd = DenseMatrix::from_sparse(sys.C);
    DenseMatrix y(m, l);
    {
        Vector col(static_cast<std::size_t>(m));
        for (index_t j = 0; j < l; ++j) {
            for (index_t i = 0; i < m; ++i) col[static_cast<std::size_t>(i)] = cd(j, i);
            Vector s = dense_chol_solve(es.chol_S, col);
            for (index_t i = 0; i < m; ++i) y(i, j) = s[static_cast<std::size_t>(i)];
        }
    }
    es.X = multiply(cd, y);
    for (index_t i = 0; i < l; ++i)
        for (index_t j = 0; j < i; ++j) {
            const double v = 0.5 * (es.X(i, j) + es.X(j, i));
            es.X(i, j) = es.X(j, i) = v;
        }
    es.chol_X = chol_dense(es.X);
    es.chol_cct = chol_dense(DenseMatrix::from_sparse(multiply(sys.C, transpose(sys.C))));
    return es;
}

ApproximationSet build_approximations(const BlockSaddleSystem& sys,
                                      const BuildOptions& opts) {
    sys.validate();
    Vector a_hat = sys.A.extract_diagonal();
    for (index_t i = 0; i < sys.n; ++i)
        if (!(a_hat[static_cast<std::size_t>(i)] > 0.0))
            throw NotPositiveDefiniteError("build_approximations: diag(A) not positive", i);

    Vector inv_a(a_hat.size());
    for (std::size_t i = 0; i < a_hat.size(); ++i) inv_a[i] = 1.0 / a_hat[i];

    // Shat = tridiag(B Ahat^{-1} B'), assembled from the |i-j| <= 1 entries
    // only: merged sparse dot products of adjacent rows of B.
    const auto& rp = sys.B.row_ptr();
    const auto& ci = sys.B.col_idx();
    const auto& bv = sys.B.values();
    auto weighted_row_dot = [&](index_t i, index_t j) {
        index_t ka = rp[static_cast<std::size_t>(i)];
        index_t kb = rp[static_cast<std::size_t>(j)];
        const index_t ea = rp[static_cast<std::size_t>(i) + 1];
        const index_t eb = rp[static_cast<std::size_t>(j) + 1];
        double s = 0.0;
        while (ka < ea && kb < eb) {
            const index_t ca = ci[static_cast<std::size_t>(ka)];
            const index_t cb = ci[static_cast<std::size_t>(kb)];
            if (ca == cb) {
                s += bv[static_cast<std::size_t>(ka)] * bv[static_cast<std::size_t>(kb)] *
                     inv_a[static_cast<std::size_t>(ca)];
                ++ka;
                ++kb;
            } else if (ca < cb) {
                ++ka;
            } else {
                ++kb;
            }
        }
        return s;
    };

    const index_t m = sys.m;
    RowBuilder sb(m, m);
    Vector sub(static_cast<std::size_t>(m), 0.0);  // subdiagonal cache
    for (index_t i = 0; i < m; ++i) {
        if (i > 0) sb.add(i - 1, sub[static_cast<std::size_t>(i)]);
        sb.add(i, weighted_row_dot(i, i));
        if (i + 1 < m) {
            const double off = weighted_row_dot(i, i + 1);
            sb.add(i + 1, off);
            sub[static_cast<std::size_t>(i) + 1] = off;
        }
        sb.finish_row();
    }
    SparseMatrix s_hat = sb.build();

    LowerFactor l_s;
    double s_hat_shift = 0.0;
    auto shifted = [&](double alpha) {
        std::vector<Triplet> ts;
        for (index_t i = 0; i < m; ++i)
            for (index_t k = s_hat.row_ptr()[static_cast<std::size_t>(i)];
                 k < s_hat.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
                ts.push_back({i, s_hat.col_idx()[static_cast<std::size_t>(k)],
                              s_hat.values()[static_cast<std::size_t>(k)]});
        for (index_t i = 0; i < m; ++i) ts.push_back({i, i, alpha});
        return SparseMatrix::from_triplets(m, m, std::move(ts));
    };
    try {
        l_s = chol_tridiag(s_hat);
    } catch (const NotPositiveDefiniteError&) {
        // Shat not SPD: retry with the trace-relative shift, then with a
        // Gershgorin-safe one (tridiagonal parts of dense products are
        // genuinely indefinite for some inputs; any SPD Shat is admissible)
        Vector d = s_hat.extract_diagonal();
        double trace = 0.0;
        for (double x : d) trace += x;
        const double tiny = 1e-12 * trace / static_cast<double>(m);
        try {
            s_hat_shift = tiny;
            s_hat = shifted(s_hat_shift);
            l_s = chol_tridiag(s_hat);
        } catch (const NotPositiveDefiniteError&) {
            double worst = 0.0;
            for (index_t i = 0; i < m; ++i) {
                double off = 0.0;
                for (index_t k = s_hat.row_ptr()[static_cast<std::size_t>(i)];
                     k < s_hat.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
                    if (s_hat.col_idx()[static_cast<std::size_t>(k)] != i)
                        off += std::abs(s_hat.values()[static_cast<std::size_t>(k)]);
                worst = std::max(worst, off - s_hat.coeff(i, i) + tiny);
            }
            s_hat_shift = tiny + worst;
            s_hat = shifted(worst);  // on top of the tiny shift already applied
            l_s = chol_tridiag(s_hat);
        }
    }

    Vector s_hat_diag = s_hat.extract_diagonal();
    Vector inv_sd(s_hat_diag.size());
    for (std::size_t i = 0; i < s_hat_diag.size(); ++i) inv_sd[i] = 1.0 / s_hat_diag[i];
    SparseMatrix x0 = multiply(scale_columns(sys.C, inv_sd), transpose(sys.C));

    IcholShifted ic = ichol_with_shift(x0, opts.ic_drop_tol, opts.ic_rule);
    BlockDiagCholesky a_solver(sys.A);
    SparseMatrix cct = multiply(sys.C, transpose(sys.C));
    IcholShifted cct_ic = ichol_with_shift(cct, opts.ic_drop_tol, opts.ic_rule);

    return ApproximationSet(std::move(a_hat), std::move(s_hat), std::move(l_s),
                            s_hat_shift, std::move(s_hat_diag), std::move(x0),
                            std::move(ic.factor), ic.shift, ic.retries,
                            std::move(a_solver), std::move(cct),
                            std::move(cct_ic.factor));
}

Vector xhat_apply(const ApproximationSet& ap, const BlockSaddleSystem& sys,
                  const Vector& v) {
    Vector t = spmv(sys.C, v, /*transpose=*/true);
    t = ap.l_s.solve(t);
    return spmv(sys.C, t);
}

namespace {

BlockSolvers make_exact_solvers(PrecondTag tag, const ExactSchurSet& es) {
    BlockSolvers bs;
    bs.solve_a = [&es](const Vector& v) { return dense_chol_solve(es.chol_A, v); };
    bs.solve_s = [&es](const Vector& v) { return dense_chol_solve(es.chol_S, v); };
    if (tag == PrecondTag::PASB) {
        bs.solve_x = [&es](const Vector& v) { return dense_chol_solve(es.chol_cct, v); };
    } else {
        bs.solve_x = [&es](const Vector& v) { return dense_chol_solve(es.chol_X, v); };
    }
    return bs;
}

BlockSolvers make_inexact_solvers(PrecondTag tag, const ApproximationSet& ap,
                                  const BlockSaddleSystem& sys,
                                  const ApplyOptions& opts, ApplyStats* stats) {
    BlockSolvers bs;
    if (opts.block11 == Block11::exact) {
        bs.solve_a = [&ap](const Vector& v) { return ap.a_solver.solve(v); };
    } else {
        bs.solve_a = [&ap](const Vector& v) {
            Vector w = v;
            for (std::size_t i = 0; i < w.size(); ++i) w[i] /= ap.a_hat[i];
            return w;
        };
    }
    bs.solve_s = [&ap](const Vector& v) { return ap.l_s.solve(v); };
    const bool asb = tag == PrecondTag::PASB;
    bs.solve_x = [&ap, &sys, opts, stats, asb](const Vector& v) {
        LinearOperator xop{sys.l, [&ap, &sys, asb](const Vector& u) {
                               if (asb) return spmv(sys.C, spmv(sys.C, u, true));
                               return xhat_apply(ap, sys, u);
                           }};
        const LowerFactor& icf = asb ? ap.cct_ic : ap.ic;
        LinearOperator mprec{sys.l,
                             [&icf](const Vector& u) { return icf.solve(u); }};
        PcgOptions popts;
        popts.tol = opts.inner_tol;
        popts.maxit = opts.inner_maxit;
        KrylovResult r = pcg(xop, mprec, v, popts);
        if (stats) {
            stats->inner_iterations += r.iterations;
            if (r.flag == SolveFlag::maxit) ++stats->inner_maxit_hits;
        }
        return r.solution;
    };
    return bs;
}

}  // namespace

Vector apply_exact(const PreconditionerKind& kind, const ExactSchurSet& es,
                   const BlockSaddleSystem& sys, const Vector& r) {
    if (kind.mode != PrecondMode::exact)
        throw DimensionError("apply_exact: kind.mode must be exact");
    return apply_with_solvers(kind.tag, make_exact_solvers(kind.tag, es), sys, r);
}

Vector apply_qbar(const ApproximationSet& ap, const BlockSaddleSystem& sys,
                  const Vector& r, double inner_tol, ApplyStats* stats) {
    ApplyOptions opts;
    opts.inner_tol = inner_tol;
    return apply_inexact({PrecondTag::Q3plus, PrecondMode::inexact}, ap, sys, r,
                         opts, stats);
}

Vector apply_inexact(const PreconditionerKind& kind, const ApproximationSet& ap,
                     const BlockSaddleSystem& sys, const Vector& r,
                     const ApplyOptions& opts, ApplyStats* stats) {
    if (kind.mode != PrecondMode::inexact)
        throw DimensionError("apply_inexact: kind.mode must be inexact");
    if (stats) ++stats->applications;
    return apply_with_solvers(kind.tag,
                              make_inexact_solvers(kind.tag, ap, sys, opts, stats),
                              sys, r);
}

LinearOperator make_exact_precond_operator(const PreconditionerKind& kind,
                                           const ExactSchurSet& es,
                                           const BlockSaddleSystem& sys) {
    return {sys.order(), [kind, &es, &sys](const Vector& r) {
                return apply_exact(kind, es, sys, r);
            }};
}

LinearOperator make_inexact_precond_operator(const PreconditionerKind& kind,
                                             const ApproximationSet& ap,
                                             const BlockSaddleSystem& sys,
                                             const ApplyOptions& opts,
                                             ApplyStats* stats) {
    return {sys.order(), [kind, &ap, &sys, opts, stats](const Vector& r) {
                return apply_inexact(kind, ap, sys, r, opts, stats);
            }};
}

SimplifiedSet build_simplified(const BlockSaddleSystem& sys,
                               const Vector* a_hat_diag, index_t max_order) {
    sys.validate();
    if (sys.order() > max_order)
        throw DimensionError("build_simplified: system exceeds the desk-scale guard");

    SimplifiedSet ss;
    if (a_hat_diag) {
        if (static_cast<index_t>(a_hat_diag->size()) != sys.n)
            throw DimensionError("build_simplified: Ahat diagonal length mismatch");
        ss.a_hat = *a_hat_diag;
    } else {
        ss.a_hat.assign(static_cast<std::size_t>(sys.n), 1.0);
    }
    for (index_t i = 0; i < sys.n; ++i)
        if (!(ss.a_hat[static_cast<std::size_t>(i)] > 0.0))
            throw NotPositiveDefiniteError("build_simplified: Ahat not positive", i);

    Vector inv_a(ss.a_hat.size());
    for (std::size_t i = 0; i < inv_a.size(); ++i) inv_a[i] = 1.0 / ss.a_hat[i];
    ss.s_hat = DenseMatrix::from_sparse(
        multiply(scale_columns(sys.B, inv_a), transpose(sys.B)));
    for (index_t i = 0; i < sys.m; ++i)
        for (index_t j = 0; j < i; ++j) {
            const double v = 0.5 * (ss.s_hat(i, j) + ss.s_hat(j, i));
            ss.s_hat(i, j) = ss.s_hat(j, i) = v;
        }
    ss.chol_s = chol_dense(ss.s_hat);

    const DenseMatrix cd = DenseMatrix::from_sparse(sys.C);
    DenseMatrix y(sys.m, sys.l);
    Vector col(static_cast<std::size_t>(sys.m));
    for (index_t j = 0; j < sys.l; ++j) {
        for (index_t i = 0; i < sys.m; ++i) col[static_cast<std::size_t>(i)] = cd(j, i);
        Vector s = dense_chol_solve(ss.chol_s, col);
        for (index_t i = 0; i < sys.m; ++i) y(i, j) = s[static_cast<std::size_t>(i)];
    }
    ss.x_hat = multiply(cd, y);
    for (index_t i = 0; i < sys.l; ++i)
        for (index_t j = 0; j < i; ++j) {
            const double v = 0.5 * (ss.x_hat(i, j) + ss.x_hat(j, i));
            ss.x_hat(i, j) = ss.x_hat(j, i) = v;
        }
    ss.chol_x = chol_dense(ss.x_hat);
    return ss;
}

Vector apply_simplified(PrecondTag tag, const SimplifiedSet& ss,
                        const BlockSaddleSystem& sys, const Vector& r) {
    if (tag == PrecondTag::PASB)
        throw DimensionError("apply_simplified: P_ASB is not part of the simplified variant");
    BlockSolvers bs;
    bs.solve_a = [&ss](const Vector& v) {
        Vector w = v;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] /= ss.a_hat[i];
        return w;
    };
    bs.solve_s = [&ss](const Vector& v) { return dense_chol_solve(ss.chol_s, v); };
    bs.solve_x = [&ss](const Vector& v) { return dense_chol_solve(ss.chol_x, v); };
    return apply_with_solvers(tag, bs, sys, r);
}

LinearOperator make_simplified_precond_operator(PrecondTag tag,
                                                const SimplifiedSet& ss,
                                                const BlockSaddleSystem& sys) {
    return {sys.order(), [tag, &ss, &sys](const Vector& r) {
                return apply_simplified(tag, ss, sys, r);
            }};
}

}  // namespace dsp
