#include "dsp/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsp/factor.hpp"
#include "dsp/rng.hpp"
#include "dsp/vec.hpp"

namespace dsp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double sign_of(double value, double sign_source) {
    return sign_source >= 0.0 ? std::abs(value) : -std::abs(value);
}

/// EISPACK-style balancing: diagonal similarity by radix powers until row
/// and column norms agree. Eigenvalues are untouched.
void balance(DenseMatrix& a) {
    const index_t n = a.rows();
    const double radix = 2.0, sq = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (index_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (index_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sq;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sq;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (index_t j = 0; j < n; ++j) a(i, j) *= ginv;
                for (index_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (eigenvalues only).
void hessenberg(DenseMatrix& a) {
    const index_t n = a.rows();
    Vector v(static_cast<std::size_t>(n), 0.0);
    for (index_t k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0.0;
        for (index_t i = k + 1; i < n; ++i) xnorm2 += a(i, k) * a(i, k);
        if (xnorm2 == 0.0) continue;
        const double alpha = a(k + 1, k);
        const double sigma = sign_of(std::sqrt(xnorm2), alpha);
        // v = x + sigma e1; H = I - 2 vv'/v'v annihilates below a(k+1,k)
        double vtv = 0.0;
        for (index_t i = k + 1; i < n; ++i) {
            v[static_cast<std::size_t>(i)] = a(i, k);
        }
        v[static_cast<std::size_t>(k) + 1] += sigma;
        for (index_t i = k + 1; i < n; ++i)
            vtv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        if (vtv == 0.0) continue;
        const double beta = 2.0 / vtv;

        // left: rows k+1..n-1 of columns k..n-1, as two row-major passes
        Vector tvec(static_cast<std::size_t>(n), 0.0);
        for (index_t i = k + 1; i < n; ++i) {
            const double vi = v[static_cast<std::size_t>(i)];
            const double* ai = a.row(i);
            for (index_t j = k; j < n; ++j) tvec[static_cast<std::size_t>(j)] += vi * ai[j];
        }
        for (index_t i = k + 1; i < n; ++i) {
            const double bvi = beta * v[static_cast<std::size_t>(i)];
            double* ai = a.row(i);
            for (index_t j = k; j < n; ++j) ai[j] -= bvi * tvec[static_cast<std::size_t>(j)];
        }
        // right: columns k+1..n-1 of every row
        for (index_t i = 0; i < n; ++i) {
            double t = 0.0;
            const double* ai = a.row(i);
            for (index_t j = k + 1; j < n; ++j)
                t += ai[j] * v[static_cast<std::size_t>(j)];
            t *= beta;
            double* aiw = a.row(i);
            for (index_t j = k + 1; j < n; ++j)
                aiw[j] -= t * v[static_cast<std::size_t>(j)];
        }
        a(k + 1, k) = -sigma;
        for (index_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

/// Francis implicit double-shift QR on an upper Hessenberg matrix.
std::vector<std::complex<double>> hqr(DenseMatrix& h) {
    const index_t n = h.rows();
    std::vector<std::complex<double>> eig(static_cast<std::size_t>(n));

    double anorm = 0.0;
    for (index_t i = 0; i < n; ++i)
        for (index_t j = std::max<index_t>(i - 1, 0); j < n; ++j)
            anorm += std::abs(h(i, j));
    if (anorm == 0.0) anorm = 1.0;

    const index_t iter_budget = 30 * n;
    index_t total_iters = 0;
    index_t nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        index_t its = 0;
        index_t l;
        for (;;) {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(h(l, l - 1)) <= kEps * s) {
                    h(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = h(nn, nn);
            if (l == nn) {  // one real eigenvalue deflated
                eig[static_cast<std::size_t>(nn)] = x + t;
                --nn;
                break;
            }
            double y = h(nn - 1, nn - 1);
            double w = h(nn, nn - 1) * h(nn - 1, nn);
            if (l == nn - 1) {  // 2x2 block deflated
                double p = 0.5 * (y - x);
                double q = p * p + w;
                double z = std::sqrt(std::abs(q));
                x += t;
                if (q >= 0.0) {
                    z = p + sign_of(z, p);
                    eig[static_cast<std::size_t>(nn) - 1] = x + z;
                    eig[static_cast<std::size_t>(nn)] =
                        z != 0.0 ? x - w / z : x + z;
                } else {
                    eig[static_cast<std::size_t>(nn) - 1] = {x + p, z};
                    eig[static_cast<std::size_t>(nn)] = {x + p, -z};
                }
                nn -= 2;
                break;
            }
            if (total_iters >= iter_budget)
                throw ConvergenceError("eig_dense: QR exceeded 30*order iterations");
            if (its == 10 || its == 20) {  // exceptional shift
                t += x;
                for (index_t i = 0; i <= nn; ++i) h(i, i) -= x;
                const double s = std::abs(h(nn, nn - 1)) + std::abs(h(nn - 1, nn - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            ++its;
            ++total_iters;

            // first column of (H - s1)(H - s2), scanning for a stable start
            index_t m;
            double p = 0.0, q = 0.0, r = 0.0;
            for (m = nn - 2; m >= l; --m) {
                const double z = h(m, m);
                const double rr = x - z;
                const double ss = y - z;
                p = (rr * ss - w) / h(m + 1, m) + h(m, m + 1);
                q = h(m + 1, m + 1) - z - rr - ss;
                r = h(m + 2, m + 1);
                const double scale = std::abs(p) + std::abs(q) + std::abs(r);
                p /= scale;
                q /= scale;
                r /= scale;
                if (m == l) break;
                const double u = std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r));
                const double v = std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) +
                                                std::abs(h(m + 1, m + 1)));
                if (u <= kEps * v) break;
            }
            for (index_t i = m + 2; i <= nn; ++i) {
                h(i, i - 2) = 0.0;
                if (i != m + 2) h(i, i - 3) = 0.0;
            }

            // bulge chase
            for (index_t k = m; k <= nn - 1; ++k) {
                if (k != m) {
                    p = h(k, k - 1);
                    q = h(k + 1, k - 1);
                    r = k != nn - 1 ? h(k + 2, k - 1) : 0.0;
                    const double x2 = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x2 == 0.0) continue;
                    p /= x2;
                    q /= x2;
                    r /= x2;
                    x = x2;
                } else {
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                }
                const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                if (s == 0.0) continue;
                if (k == m) {
                    if (l != m) h(k, k - 1) = -h(k, k - 1);
                } else {
                    h(k, k - 1) = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                const double z = r / s;
                q /= p;
                r /= p;

                for (index_t j = k; j <= nn; ++j) {  // row transform
                    double pp = h(k, j) + q * h(k + 1, j);
                    if (k + 2 <= nn) pp += r * h(k + 2, j);
                    h(k, j) -= pp * x;
                    h(k + 1, j) -= pp * y;
                    if (k + 2 <= nn) h(k + 2, j) -= pp * z;
                }
                const index_t mmin = std::min(nn, k + 3);
                for (index_t i = l; i <= mmin; ++i) {  // column transform
                    double pp = x * h(i, k) + y * h(i, k + 1);
                    if (k + 2 <= nn) pp += z * h(i, k + 2);
                    h(i, k) -= pp;
                    h(i, k + 1) -= pp * q;
                    if (k + 2 <= nn) h(i, k + 2) -= pp * r;
                }
            }
        }
        if (nn < 0) break;
    }
    return eig;
}

}  // namespace

double eig_residual_spot_check(const DenseMatrix& m,
                               const std::vector<std::complex<double>>& values,
                               int sample) {
    using cd = std::complex<double>;
    const index_t n = m.rows();
    if (n == 0 || values.empty()) return 0.0;
    const double mnorm = std::max(frobenius_norm(m), 1e-300);
    Rng rng(20240531u);

    double worst = 0.0;
    const int count = std::min<int>(sample, static_cast<int>(values.size()));
    for (int s = 0; s < count; ++s) {
        // spread the sample across the spectrum
        const std::size_t pick = values.size() * static_cast<std::size_t>(s) /
                                 static_cast<std::size_t>(count);
        // perturb the shift slightly so M - shift I stays invertible
        const cd shift = values[pick] * (1.0 + 1e-9) + cd(1e-12 * mnorm, 0.0);

        std::vector<cd> lu(static_cast<std::size_t>(n * n));
        for (index_t i = 0; i < n; ++i)
            for (index_t j = 0; j < n; ++j)
                lu[static_cast<std::size_t>(i * n + j)] =
                    cd(m(i, j), 0.0) - (i == j ? shift : cd(0.0, 0.0));
        std::vector<index_t> piv(static_cast<std::size_t>(n));
        bool singular = false;
        for (index_t k = 0; k < n; ++k) {
            index_t p = k;
            for (index_t i = k + 1; i < n; ++i)
                if (std::abs(lu[static_cast<std::size_t>(i * n + k)]) >
                    std::abs(lu[static_cast<std::size_t>(p * n + k)]))
                    p = i;
            piv[static_cast<std::size_t>(k)] = p;
            if (p != k)
                for (index_t j = 0; j < n; ++j)
                    std::swap(lu[static_cast<std::size_t>(k * n + j)],
                              lu[static_cast<std::size_t>(p * n + j)]);
            const cd pivot = lu[static_cast<std::size_t>(k * n + k)];
            if (std::abs(pivot) == 0.0) {
                singular = true;
                break;
            }
            for (index_t i = k + 1; i < n; ++i) {
                const cd f = lu[static_cast<std::size_t>(i * n + k)] / pivot;
                lu[static_cast<std::size_t>(i * n + k)] = f;
                for (index_t j = k + 1; j < n; ++j)
                    lu[static_cast<std::size_t>(i * n + j)] -=
                        f * lu[static_cast<std::size_t>(k * n + j)];
            }
        }
        if (singular) continue;

        std::vector<cd> v(static_cast<std::size_t>(n));
        for (cd& x : v) x = cd(rng.uniform() - 0.5, rng.uniform() - 0.5);
        for (int iter = 0; iter < 2; ++iter) {
            for (index_t k = 0; k < n; ++k)
                if (piv[static_cast<std::size_t>(k)] != k)
                    std::swap(v[static_cast<std::size_t>(k)],
                              v[static_cast<std::size_t>(piv[static_cast<std::size_t>(k)])]);
            for (index_t i = 0; i < n; ++i)
                for (index_t j = 0; j < i; ++j)
                    v[static_cast<std::size_t>(i)] -=
                        lu[static_cast<std::size_t>(i * n + j)] * v[static_cast<std::size_t>(j)];
            for (index_t i = n - 1; i >= 0; --i) {
                for (index_t j = i + 1; j < n; ++j)
                    v[static_cast<std::size_t>(i)] -=
                        lu[static_cast<std::size_t>(i * n + j)] * v[static_cast<std::size_t>(j)];
                v[static_cast<std::size_t>(i)] /= lu[static_cast<std::size_t>(i * n + i)];
            }
            double vn = 0.0;
            for (const cd& x : v) vn += std::norm(x);
            vn = std::sqrt(vn);
            for (cd& x : v) x /= vn;
        }
        // residual ||M v - lambda v||
        double rn = 0.0;
        for (index_t i = 0; i < n; ++i) {
            cd acc = -values[pick] * v[static_cast<std::size_t>(i)];
            for (index_t j = 0; j < n; ++j)
                acc += m(i, j) * v[static_cast<std::size_t>(j)];
            rn += std::norm(acc);
        }
        worst = std::max(worst, std::sqrt(rn) / mnorm);
    }
    return worst;
}

Spectrum eig_dense(const DenseMatrix& m, const EigOptions& opts) {
    if (m.rows() != m.cols()) throw DimensionError("eig_dense: matrix not square");
    Spectrum spec;
    if (m.rows() == 0) return spec;
    if (m.rows() == 1) {
        spec.values.emplace_back(m(0, 0), 0.0);
        return spec;
    }
    DenseMatrix work = m;
    balance(work);
    hessenberg(work);
    spec.values = hqr(work);
    std::sort(spec.values.begin(), spec.values.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
              });
    if (opts.residual_check && m.rows() <= opts.residual_check_max_order) {
        const double worst =
            eig_residual_spot_check(m, spec.values, opts.residual_sample);
        if (worst > opts.residual_tol)
            throw ConvergenceError("eig_dense: backward-error spot check failed");
    }
    return spec;
}

std::vector<double> eig_symmetric(DenseMatrix a) {
    const index_t n = a.rows();
    if (a.rows() != a.cols()) throw DimensionError("eig_symmetric: matrix not square");
    Vector d(static_cast<std::size_t>(n), 0.0);
    Vector e(static_cast<std::size_t>(n), 0.0);
    if (n == 0) return {};
    if (n == 1) return {a(0, 0)};

    // Householder tridiagonalization (no transform accumulation)
    for (index_t i = n - 1; i >= 1; --i) {
        const index_t li = i - 1;
        double h = 0.0, sc = 0.0;
        if (li > 0) {
            for (index_t k = 0; k <= li; ++k) sc += std::abs(a(i, k));
            if (sc == 0.0) {
                e[static_cast<std::size_t>(i)] = a(i, li);
            } else {
                for (index_t k = 0; k <= li; ++k) {
                    a(i, k) /= sc;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, li);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[static_cast<std::size_t>(i)] = sc * g;
                h -= f * g;
                a(i, li) = f - g;
                f = 0.0;
                for (index_t j = 0; j <= li; ++j) {
                    g = 0.0;
                    for (index_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (index_t k = j + 1; k <= li; ++k) g += a(k, j) * a(i, k);
                    e[static_cast<std::size_t>(j)] = g / h;
                    f += e[static_cast<std::size_t>(j)] * a(i, j);
                }
                const double hh = f / (h + h);
                for (index_t j = 0; j <= li; ++j) {
                    f = a(i, j);
                    g = e[static_cast<std::size_t>(j)] -= hh * f;
                    for (index_t k = 0; k <= j; ++k)
                        a(j, k) -= f * e[static_cast<std::size_t>(k)] + g * a(i, k);
                }
            }
        } else {
            e[static_cast<std::size_t>(i)] = a(i, li);
        }
    }
    for (index_t i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = a(i, i);

    // implicit QL with Wilkinson shift
    for (index_t i = 1; i < n; ++i) e[static_cast<std::size_t>(i) - 1] = e[static_cast<std::size_t>(i)];
    e[static_cast<std::size_t>(n) - 1] = 0.0;
    for (index_t lq = 0; lq < n; ++lq) {
        index_t iter = 0;
        index_t mq;
        do {
            for (mq = lq; mq < n - 1; ++mq) {
                const double dd = std::abs(d[static_cast<std::size_t>(mq)]) +
                                  std::abs(d[static_cast<std::size_t>(mq) + 1]);
                if (std::abs(e[static_cast<std::size_t>(mq)]) <= kEps * dd) break;
            }
            if (mq != lq) {
                if (iter++ == 50)
                    throw ConvergenceError("eig_symmetric: QL did not converge");
                double g = (d[static_cast<std::size_t>(lq) + 1] - d[static_cast<std::size_t>(lq)]) /
                           (2.0 * e[static_cast<std::size_t>(lq)]);
                double r = std::hypot(g, 1.0);
                g = d[static_cast<std::size_t>(mq)] - d[static_cast<std::size_t>(lq)] +
                    e[static_cast<std::size_t>(lq)] / (g + sign_of(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                index_t i;
                for (i = mq - 1; i >= lq; --i) {
                    double f = s * e[static_cast<std::size_t>(i)];
                    const double b = c * e[static_cast<std::size_t>(i)];
                    r = std::hypot(f, g);
                    e[static_cast<std::size_t>(i) + 1] = r;
                    if (r == 0.0) {
                        d[static_cast<std::size_t>(i) + 1] -= p;
                        e[static_cast<std::size_t>(mq)] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[static_cast<std::size_t>(i) + 1] - p;
                    r = (d[static_cast<std::size_t>(i)] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[static_cast<std::size_t>(i) + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= lq) continue;
                d[static_cast<std::size_t>(lq)] -= p;
                e[static_cast<std::size_t>(lq)] = g;
                e[static_cast<std::size_t>(mq)] = 0.0;
            }
        } while (mq != lq);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::pair<double, double> eig_sym_pencil_extremes(const DenseMatrix& msym,
                                                  const DenseMatrix& nspd) {
    if (msym.rows() != msym.cols() || nspd.rows() != nspd.cols() ||
        msym.rows() != nspd.rows())
        throw DimensionError("eig_sym_pencil_extremes: shape mismatch");
    const index_t n = msym.rows();
    const DenseMatrix lf = chol_dense(nspd);  // throws if N is not SPD

    // C = L^{-1} M L^{-T}, computed by triangular solves against columns
    DenseMatrix y(n, n);
    Vector col(static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j) {
        for (index_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = msym(i, j);
        Vector s = dense_lower_solve(lf, col);
        for (index_t i = 0; i < n; ++i) y(i, j) = s[static_cast<std::size_t>(i)];
    }
    DenseMatrix c(n, n);
    for (index_t j = 0; j < n; ++j) {
        for (index_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = y(j, i);
        Vector s = dense_lower_solve(lf, col);
        for (index_t i = 0; i < n; ++i) c(j, i) = s[static_cast<std::size_t>(i)];
    }
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < i; ++j) {
            const double v = 0.5 * (c(i, j) + c(j, i));
            c(i, j) = c(j, i) = v;
        }
    const std::vector<double> vals = eig_symmetric(std::move(c));
    return {vals.front(), vals.back()};
}

std::pair<double, double> eig_sym_pencil_extremes(const SparseMatrix& msym,
                                                  const SparseMatrix& nspd) {
    return eig_sym_pencil_extremes(DenseMatrix::from_sparse(msym),
                                   DenseMatrix::from_sparse(nspd));
}

}  // namespace dsp
