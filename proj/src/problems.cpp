#include "dsp/problems.hpp"

#include <algorithm>
#include <cmath>

#include "dsp/dense.hpp"
#include "dsp/rng.hpp"

namespace dsp {

SparseMatrix example1_e1(index_t p) {
    RowBuilder b(p, p + 1);
    for (index_t i = 0; i < p; ++i) {
        b.add(i, 2.0);
        b.add(i + 1, -1.0);
        b.finish_row();
    }
    return b.build();
}

namespace {

// Rows of E = [E1 (x) I_p; I_p (x) E1] stacked.
SparseMatrix example1_e(index_t p) {
    const SparseMatrix e1 = example1_e1(p);
    const SparseMatrix ip = SparseMatrix::identity(p);
    const SparseMatrix top = kron(e1, ip);
    const SparseMatrix bottom = kron(ip, e1);

    const index_t p1 = p * p, p2 = p * (p + 1);
    RowBuilder out(2 * p1, p2);
    auto copy_rows = [&](const SparseMatrix& src) {
        for (index_t i = 0; i < src.rows(); ++i) {
            for (index_t k = src.row_ptr()[static_cast<std::size_t>(i)];
                 k < src.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
                out.add(src.col_idx()[static_cast<std::size_t>(k)],
                        src.values()[static_cast<std::size_t>(k)]);
            out.finish_row();
        }
    };
    copy_rows(top);
    copy_rows(bottom);
    return out.build();
}

}  // namespace

BlockSaddleSystem gen_example1(index_t p, const Example1Options& opts) {
    if (p < 2) throw DimensionError("gen_example1: p must be >= 2");
    const index_t p1 = p * p;
    const index_t p2 = p * (p + 1);
    const index_t n = 5 * p1 + p;
    const index_t m = 2 * p1;
    const index_t l = p2;

    // W(i,j) = exp(-2((i/3)^2 + (j/3)^2)) = u_i * u_j, so 2W'W = 2||u||^2 uu'.
    // Entries below ~1e-308 underflow and vanish from the pattern.
    Vector u(static_cast<std::size_t>(p2));
    for (index_t i = 1; i <= p2; ++i) {
        const double t = static_cast<double>(i) / 3.0;
        u[static_cast<std::size_t>(i - 1)] = std::exp(-2.0 * t * t);
    }
    double sigma = 0.0;
    for (double ui : u) sigma += ui * ui;

    RowBuilder a(n, n);
    const double two_sigma = 2.0 * sigma;
    for (index_t i = 0; i < p2; ++i) {
        const double ui = u[static_cast<std::size_t>(i)];
        for (index_t j = 0; j < p2; ++j) {
            // u_i*u_j first keeps the entry bit-symmetric in (i,j)
            double v = two_sigma * (ui * u[static_cast<std::size_t>(j)]);
            if (i == j) v += 1.0;  // D1 = I
            a.add(j, v);
        }
        a.finish_row();
    }
    const double lit = static_cast<double>(p1) * static_cast<double>(p1);
    for (index_t j = 1; j <= 2 * p1; ++j) {  // D2
        double d;
        if (j <= p1)
            d = 1.0;
        else if (opts.d_formula == DFormulaVariant::squared)
            d = 1e-5 * static_cast<double>((j - p1) * (j - p1));
        else
            d = 1e-5 * (static_cast<double>(j) - lit);
        a.add(p2 + j - 1, d);
        a.finish_row();
    }
    for (index_t j = 1; j <= 2 * p1; ++j) {  // D3
        const double d = opts.d_formula == DFormulaVariant::squared
                             ? 1e-5 * static_cast<double>((j + p1) * (j + p1))
                             : 1e-5 * (static_cast<double>(j) + lit);
        a.add(p2 + 2 * p1 + j - 1, d);
        a.finish_row();
    }

    const SparseMatrix e = example1_e(p);
    RowBuilder b(m, n);
    for (index_t i = 0; i < m; ++i) {
        for (index_t k = e.row_ptr()[static_cast<std::size_t>(i)];
             k < e.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
            b.add(e.col_idx()[static_cast<std::size_t>(k)],
                  e.values()[static_cast<std::size_t>(k)]);
        b.add(p2 + i, -1.0);
        b.add(p2 + 2 * p1 + i, 1.0);
        b.finish_row();
    }

    BlockSaddleSystem sys;
    sys.A = a.build();
    sys.B = b.build();
    sys.C = transpose(e);
    sys.n = n;
    sys.m = m;
    sys.l = l;
    sys.validate();
    return sys;
}

BlockSaddleSystem gen_example2(index_t n, index_t m, index_t l, std::uint64_t seed,
                               std::uint64_t* used_seed) {
    if (!(n >= m && m >= l && l >= 1))
        throw DimensionError("gen_example2: need n >= m >= l >= 1");

    for (std::uint64_t s = seed;; ++s) {
        Rng rng(s);
        const double z = 1.0 + 10.0 * rng.uniform();
        Vector w(static_cast<std::size_t>(n));
        for (double& x : w) x = z * rng.uniform();
        std::sort(w.begin(), w.end());
        for (double& x : w) x += 0.1;
        const index_t tied = std::min<index_t>(10, n);
        for (index_t i = 0; i < tied; ++i) w[static_cast<std::size_t>(i)] = w[0];

        auto dense_uniform = [&](index_t rows, index_t cols) {
            RowBuilder rb(rows, cols);
            for (index_t i = 0; i < rows; ++i) {
                for (index_t j = 0; j < cols; ++j) rb.add(j, rng.uniform());
                rb.finish_row();
            }
            return rb.build();
        };

        BlockSaddleSystem sys;
        sys.A = SparseMatrix::diagonal(w);
        sys.B = dense_uniform(m, n);
        sys.C = dense_uniform(l, m);
        sys.n = n;
        sys.m = m;
        sys.l = l;
        sys.validate();

        // rank-deficient draws essentially never happen; retry with the next
        // seed when they do, and report which seed produced the system
        const bool full_rank =
            dense_rank(DenseMatrix::from_sparse(sys.B)) == m &&
            dense_rank(DenseMatrix::from_sparse(sys.C)) == l;
        if (full_rank) {
            if (used_seed) *used_seed = s;
            return sys;
        }
    }
}

}  // namespace dsp
