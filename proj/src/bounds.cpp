#include "dsp/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "dsp/factor.hpp"
#include "dsp/vec.hpp"

namespace dsp {

namespace {

DenseMatrix diagonal_dense(const Vector& d) {
    DenseMatrix m(static_cast<index_t>(d.size()), static_cast<index_t>(d.size()));
    for (index_t i = 0; i < m.rows(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    return m;
}

GammaRange pencil_range(const DenseMatrix& msym, const DenseMatrix& nspd) {
    auto [lo, hi] = eig_sym_pencil_extremes(msym, nspd);
    return {lo, hi};
}

}  // namespace

GammaRanges compute_gamma_ranges(const BlockSaddleSystem& sys,
                                 const ApproximationSet& ap, index_t max_order) {
    sys.validate();
    if (sys.order() > max_order)
        throw DimensionError("compute_gamma_ranges: system exceeds the desk-scale guard");

    GammaRanges g;
    g.a = pencil_range(DenseMatrix::from_sparse(sys.A), diagonal_dense(ap.a_hat));

    Vector inv_a(ap.a_hat.size());
    for (std::size_t i = 0; i < inv_a.size(); ++i) inv_a[i] = 1.0 / ap.a_hat[i];
    const DenseMatrix s_tilde = DenseMatrix::from_sparse(
        multiply(scale_columns(sys.B, inv_a), transpose(sys.B)));
    g.s = pencil_range(s_tilde, DenseMatrix::from_sparse(ap.s_hat));

    // Xtilde = C Shat^{-1} C' and the materialized Xhat operator coincide by
    // construction (L_S is the exact factor of Shat); both are built the same
    // way and the pencil just confirms it.
    const index_t l = sys.l;
    DenseMatrix x_tilde(l, l);
    {
        Vector unit(static_cast<std::size_t>(l), 0.0);
        for (index_t j = 0; j < l; ++j) {
            unit[static_cast<std::size_t>(j)] = 1.0;
            Vector col = xhat_apply(ap, sys, unit);
            for (index_t i = 0; i < l; ++i) x_tilde(i, j) = col[static_cast<std::size_t>(i)];
            unit[static_cast<std::size_t>(j)] = 0.0;
        }
    }
    for (index_t i = 0; i < l; ++i)
        for (index_t j = 0; j < i; ++j) {
            const double v = 0.5 * (x_tilde(i, j) + x_tilde(j, i));
            x_tilde(i, j) = x_tilde(j, i) = v;
        }
    g.x = pencil_range(x_tilde, x_tilde);
    return g;
}

GammaRanges compute_gamma_ranges_simplified(const BlockSaddleSystem& sys,
                                            const SimplifiedSet& ss,
                                            index_t max_order) {
    sys.validate();
    if (sys.order() > max_order)
        throw DimensionError(
            "compute_gamma_ranges_simplified: system exceeds the desk-scale guard");
    GammaRanges g;
    g.a = pencil_range(DenseMatrix::from_sparse(sys.A), diagonal_dense(ss.a_hat));
    // Shat == Stilde and Xhat == Xtilde here, so these are identity pencils.
    g.s = pencil_range(ss.s_hat, ss.s_hat);
    g.x = pencil_range(ss.x_hat, ss.x_hat);
    return g;
}

double complex_disc_bound(double gamma_a_min) {
    if (!(gamma_a_min > 0.0))
        throw DimensionError("complex_disc_bound: gamma_min^A must be positive");
    if (gamma_a_min >= 1.0) return 0.0;
    return std::sqrt(1.0 - gamma_a_min);
}

Interval real_interval_general(const GammaRanges& g) {
    const double ky0_lo = g.s.min / (g.a.max + g.s.min);
    const double cubic_lo =
        g.a.min * g.x.min / (g.x.min + g.s.max + g.a.min * g.x.min);
    const double lo = std::min({ky0_lo, cubic_lo, g.a.min});
    const double hi = g.a.max + g.s.max + g.x.max;
    return {lo, hi};
}

std::vector<double> cubic_real_roots(double ga, double gs, double gx) {
    if (!(ga > 0.0 && gs > 0.0 && gx > 0.0))
        throw DimensionError("cubic_real_roots: gammas must be positive");
    // x^3 + a2 x^2 + a1 x + a0
    const double a2 = -(ga + gs + gx);
    const double a1 = gs + gx + ga * gx;
    const double a0 = -ga * gx;

    auto poly = [&](double x) { return ((x + a2) * x + a1) * x + a0; };
    auto dpoly = [&](double x) { return (3.0 * x + 2.0 * a2) * x + a1; };
    auto polish = [&](double x) {
        for (int it = 0; it < 60; ++it) {
            const double f = poly(x);
            const double df = dpoly(x);
            if (df == 0.0 || std::abs(f) <= 1e-14 * (1.0 + std::abs(x) * std::abs(x) * std::abs(x)))
                break;
            x -= f / df;
        }
        return x;
    };

    // depressed cubic t^3 + p t + q with x = t - a2/3
    const double shift = a2 / 3.0;
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;

    std::vector<double> roots;
    if (disc >= 0.0 && p <= 0.0) {
        if (p == 0.0) {
            roots.assign(3, -shift);  // triple root
        } else {
            const double rho = 2.0 * std::sqrt(-p / 3.0);
            double arg = 3.0 * q / (p * rho);
            arg = std::clamp(arg, -1.0, 1.0);
            const double theta = std::acos(arg) / 3.0;
            for (int k = 0; k < 3; ++k)
                roots.push_back(rho * std::cos(theta - 2.0 * M_PI * k / 3.0) - shift);
        }
    } else {
        // single real root (Cardano, stable branch)
        const double u = -q / 2.0 + std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
        const double cu = std::cbrt(u);
        const double t = cu == 0.0 ? -std::cbrt(q) : cu - p / (3.0 * cu);
        roots.push_back(t - shift);
    }
    for (double& r : roots) r = polish(r);
    std::sort(roots.begin(), roots.end());
    return roots;
}

double lambda_plus(double gamma) {
    if (!(gamma > 0.0)) throw DimensionError("lambda_plus: gamma must be positive");
    auto poly = [&](double x) {
        return ((x - (2.0 + gamma)) * x + (2.0 + gamma)) * x - gamma;
    };
    auto dpoly = [&](double x) {
        return (3.0 * x - 2.0 * (2.0 + gamma)) * x + (2.0 + gamma);
    };
    double lo = 0.0, hi = gamma + 2.0;  // p(0) < 0 < p(gamma+2)
    double x = std::min(1.0, 0.5 * hi);
    for (int it = 0; it < 300; ++it) {
        const double f = poly(x);
        if (f == 0.0) return x;
        if (f < 0.0)
            lo = x;
        else
            hi = x;
        const double df = dpoly(x);
        double next = df != 0.0 ? x - f / df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
        if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) return next;
        x = next;
    }
    return x;
}

BoundReport simplified_bounds(const GammaRange& gamma_a) {
    if (!(gamma_a.min > 0.0 && gamma_a.max >= gamma_a.min))
        throw DimensionError("simplified_bounds: bad gamma range");
    BoundReport rep;
    rep.variant = BoundVariant::simplified;
    rep.lambda_plus_min = lambda_plus(gamma_a.min);
    rep.lambda_plus_max = lambda_plus(gamma_a.max);
    rep.real_interval = {
        std::min({rep.lambda_plus_min, gamma_a.min, 1.0 / (gamma_a.max + 1.0)}),
        std::max(rep.lambda_plus_max, gamma_a.max + 1.0)};
    rep.synthetic_interval = Interval{gamma_a.min / 2.0, gamma_a.max + 1.0};
    rep.ky0_radius = complex_disc_bound(std::min(gamma_a.min, 1.0));
    rep.assumption_one_in_gamma_a = gamma_a.min <= 1.0 && 1.0 <= gamma_a.max;
    return rep;
}

BoundReport verify_bounds(const Spectrum& spec, const GammaRanges& g,
                          BoundVariant variant) {
    BoundReport rep;
    if (variant == BoundVariant::simplified) {
        rep = simplified_bounds(g.a);
    } else {
        rep.variant = BoundVariant::general;
        rep.real_interval = real_interval_general(g);
        rep.ky0_radius = complex_disc_bound(std::min(g.a.min, 1.0));
        rep.assumption_one_in_gamma_a = g.a.min <= 1.0 && 1.0 <= g.a.max;
    }
    rep.gammas = g;
    rep.complex_radius = 1.0;

    // slack absorbs eigensolver rounding; the theory gives open/closed
    // inequalities at exact arithmetic
    const double real_slack = 1e-8 * std::max(1.0, std::abs(rep.real_interval.hi));
    const double disc_slack = 1e-10;

    bool first_real = true;
    for (const std::complex<double>& lam : spec.values) {
        EigenvalueCheck chk;
        chk.value = lam;
        chk.is_real = std::abs(lam.imag()) <= 1e-8 * std::max(1.0, std::abs(lam));
        if (chk.is_real) {
            ++rep.real_count;
            const double v = lam.real();
            if (first_real) {
                rep.real_min = rep.real_max = v;
                first_real = false;
            } else {
                rep.real_min = std::min(rep.real_min, v);
                rep.real_max = std::max(rep.real_max, v);
            }
            chk.pass = rep.real_interval.contains(v, real_slack);
            if (rep.synthetic_interval)
                chk.pass = chk.pass && rep.synthetic_interval->contains(v, real_slack);
        } else {
            ++rep.complex_count;
            chk.pass = std::abs(lam - std::complex<double>(1.0, 0.0)) <
                       rep.complex_radius * (1.0 + disc_slack) + disc_slack;
        }
        rep.all_pass = rep.all_pass && chk.pass;
        rep.checks.push_back(chk);
    }
    return rep;
}

}  // namespace dsp
