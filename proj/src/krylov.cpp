#include "dsp/krylov.hpp"

#include <chrono>
#include <cmath>

#include "dsp/vec.hpp"

namespace dsp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

double tolerance_schedule(index_t total_order) {
    if (total_order < 1) throw DimensionError("tolerance_schedule: N must be >= 1");
    const double n = static_cast<double>(total_order);
    return 10.0 / (n * n);
}

KrylovResult fgmres(const LinearOperator& op, const LinearOperator& precond,
                    const Vector& b, const FgmresOptions& opts) {
    const auto t0 = Clock::now();
    const index_t n = op.dim;
    if (static_cast<index_t>(b.size()) != n) throw DimensionError("fgmres: rhs length mismatch");
    if (!(opts.tol > 0.0)) throw DimensionError("fgmres: tol must be positive");
    const index_t maxit = opts.maxit > 0 ? opts.maxit : std::min<index_t>(n, 500);

    KrylovResult res;
    res.solution.assign(static_cast<std::size_t>(n), 0.0);

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.final_rel_residual = 0.0;
        res.flag = SolveFlag::converged;
        res.wall_time = seconds_since(t0);
        return res;
    }

    std::vector<Vector> v;  // Arnoldi basis
    std::vector<Vector> z;  // preconditioned basis (flexible variant)
    std::vector<std::vector<double>> h;  // h[j] = column j, length j+2
    std::vector<double> cs, sn, g;

    v.push_back(b);
    scale(1.0 / bnorm, v[0]);
    g.push_back(bnorm);

    auto reconstruct = [&](index_t k) {
        // back substitution on the k x k triangular system, then x = Z y
        std::vector<double> y(static_cast<std::size_t>(k), 0.0);
        for (index_t i = k - 1; i >= 0; --i) {
            double s = g[static_cast<std::size_t>(i)];
            for (index_t j = i + 1; j < k; ++j)
                s -= h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                     y[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] =
                s / h[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        }
        Vector x(static_cast<std::size_t>(n), 0.0);
        for (index_t j = 0; j < k; ++j)
            axpy(y[static_cast<std::size_t>(j)], z[static_cast<std::size_t>(j)], x);
        return x;
    };

    double true_rel = 1.0;
    bool have_true = false;
    for (index_t j = 0; j < maxit; ++j) {
        z.push_back(precond.apply(v[static_cast<std::size_t>(j)]));
        Vector w = op.apply(z.back());

        std::vector<double> hj(static_cast<std::size_t>(j) + 2, 0.0);
        for (index_t i = 0; i <= j; ++i) {
            const double hij = dot(w, v[static_cast<std::size_t>(i)]);
            hj[static_cast<std::size_t>(i)] = hij;
            axpy(-hij, v[static_cast<std::size_t>(i)], w);
        }
        if (opts.reorthogonalize) {
            for (index_t i = 0; i <= j; ++i) {
                const double corr = dot(w, v[static_cast<std::size_t>(i)]);
                hj[static_cast<std::size_t>(i)] += corr;
                axpy(-corr, v[static_cast<std::size_t>(i)], w);
            }
        }
        const double wnorm = norm2(w);
        hj[static_cast<std::size_t>(j) + 1] = wnorm;
        if (std::isnan(wnorm)) {
            res.flag = SolveFlag::breakdown;
            res.iterations = j;
            res.final_rel_residual = have_true ? true_rel : 1.0;
            res.wall_time = seconds_since(t0);
            return res;
        }
        const bool happy = wnorm <= 1e-14 * bnorm;
        if (!happy) {
            scale(1.0 / wnorm, w);
            v.push_back(std::move(w));
        }

        // apply accumulated rotations, then a new one to annihilate h[j+1][j]
        for (index_t i = 0; i < j; ++i) {
            const double t = cs[static_cast<std::size_t>(i)] * hj[static_cast<std::size_t>(i)] +
                             sn[static_cast<std::size_t>(i)] * hj[static_cast<std::size_t>(i) + 1];
            hj[static_cast<std::size_t>(i) + 1] =
                -sn[static_cast<std::size_t>(i)] * hj[static_cast<std::size_t>(i)] +
                cs[static_cast<std::size_t>(i)] * hj[static_cast<std::size_t>(i) + 1];
            hj[static_cast<std::size_t>(i)] = t;
        }
        const double denom = std::hypot(hj[static_cast<std::size_t>(j)],
                                        hj[static_cast<std::size_t>(j) + 1]);
        const double c = denom == 0.0 ? 1.0 : hj[static_cast<std::size_t>(j)] / denom;
        const double s = denom == 0.0 ? 0.0 : hj[static_cast<std::size_t>(j) + 1] / denom;
        cs.push_back(c);
        sn.push_back(s);
        hj[static_cast<std::size_t>(j)] = denom;
        hj[static_cast<std::size_t>(j) + 1] = 0.0;
        h.push_back(std::move(hj));

        const double g_next = -s * g[static_cast<std::size_t>(j)];
        g[static_cast<std::size_t>(j)] *= c;
        g.push_back(g_next);

        const double est_rel = std::abs(g_next) / bnorm;
        if (std::isnan(est_rel)) {
            res.flag = SolveFlag::breakdown;
            res.iterations = j + 1;
            res.final_rel_residual = have_true ? true_rel : 1.0;
            res.wall_time = seconds_since(t0);
            return res;
        }
        res.rel_residual_history.push_back(est_rel);

        const bool last = (j + 1 == maxit);
        if (est_rel < opts.tol || happy || last) {
            Vector x = reconstruct(j + 1);
            Vector r = b;
            axpy(-1.0, op.apply(x), r);
            true_rel = norm2(r) / bnorm;
            have_true = true;
            res.rel_residual_history.back() = true_rel;
            if (true_rel < opts.tol || (happy && est_rel < opts.tol)) {
                res.solution = std::move(x);
                res.iterations = j + 1;
                res.final_rel_residual = true_rel;
                res.flag = SolveFlag::converged;
                res.wall_time = seconds_since(t0);
                return res;
            }
            if (last || happy) {
                res.solution = std::move(x);  // best iterate
                res.iterations = j + 1;
                res.final_rel_residual = true_rel;
                res.flag = SolveFlag::maxit;
                res.wall_time = seconds_since(t0);
                return res;
            }
        }
    }
    // maxit == 0 edge: never entered the loop
    res.flag = SolveFlag::maxit;
    res.wall_time = seconds_since(t0);
    return res;
}

KrylovResult pcg(const LinearOperator& op, const LinearOperator& precond,
                 const Vector& b, const PcgOptions& opts) {
    const auto t0 = Clock::now();
    const index_t n = op.dim;
    if (static_cast<index_t>(b.size()) != n) throw DimensionError("pcg: rhs length mismatch");

    KrylovResult res;
    res.solution.assign(static_cast<std::size_t>(n), 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.flag = SolveFlag::converged;
        res.wall_time = seconds_since(t0);
        return res;
    }

    Vector r = b;  // zero initial guess
    Vector zv = precond.apply(r);
    Vector p = zv;
    double rz = dot(r, zv);
    const double rz_initial = rz;

    for (index_t it = 1; it <= opts.maxit; ++it) {
        Vector ap = op.apply(p);
        const double pap = dot(p, ap);
        if (!(pap > 0.0))
            throw IndefiniteOperatorError("pcg: operator is not positive definite");
        const double alpha = rz / pap;
        axpy(alpha, p, res.solution);
        axpy(-alpha, ap, r);

        zv = precond.apply(r);
        const double rz_new = dot(r, zv);

        const double stop_value =
            opts.stop == PcgStop::true_residual
                ? norm2(r) / bnorm
                : std::sqrt(std::max(0.0, rz_new) / std::max(rz_initial, 1e-300));
        res.rel_residual_history.push_back(stop_value);
        res.iterations = it;
        if (std::isnan(stop_value)) {
            res.flag = SolveFlag::breakdown;
            res.final_rel_residual = stop_value;
            res.wall_time = seconds_since(t0);
            return res;
        }
        if (stop_value < opts.tol) {
            res.flag = SolveFlag::converged;
            res.final_rel_residual = stop_value;
            res.wall_time = seconds_since(t0);
            return res;
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = zv[i] + beta * p[i];
    }
    res.flag = SolveFlag::maxit;
    res.final_rel_residual =
        res.rel_residual_history.empty() ? 1.0 : res.rel_residual_history.back();
    res.wall_time = seconds_since(t0);
    return res;
}

}  // namespace dsp
