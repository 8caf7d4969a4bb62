#include "dsp/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dsp {

LowerFactor chol_tridiag(const SparseMatrix& t) {
    const index_t n = t.rows();
    if (t.rows() != t.cols()) throw DimensionError("chol_tridiag: matrix not square");
    for (index_t i = 0; i < n; ++i)
        for (index_t k = t.row_ptr()[static_cast<std::size_t>(i)];
             k < t.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            const index_t j = t.col_idx()[static_cast<std::size_t>(k)];
            if (j < i - 1 || j > i + 1)
                throw DimensionError("chol_tridiag: matrix not tridiagonal");
        }

    RowBuilder lb(n, n);
    double prev_diag = 0.0;
    for (index_t i = 0; i < n; ++i) {
        double sub = 0.0;
        if (i > 0) {
            sub = t.coeff(i, i - 1) / prev_diag;
            lb.add(i - 1, sub);
        }
        const double d = t.coeff(i, i) - sub * sub;
        if (!(d > 0.0))
            throw NotPositiveDefiniteError("chol_tridiag: non-positive pivot", i);
        const double diag = std::sqrt(d);
        lb.add(i, diag);
        lb.finish_row();
        prev_diag = diag;
    }
    LowerFactor f;
    f.L = lb.build();
    f.kind = FactorKind::bidiagonal_cholesky;
    return f;
}

DenseMatrix chol_dense(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("chol_dense: matrix not square");
    const index_t n = m.rows();
    DenseMatrix l = m;
    const index_t nb = 80;

    // unblocked factor of l[k0..k1) x [k0..k1), updating only the lower part
    auto potf2 = [&](index_t k0, index_t k1) {
        for (index_t j = k0; j < k1; ++j) {
            double* lj = l.row(j);
            double d = lj[j];
            for (index_t k = k0; k < j; ++k) d -= lj[k] * lj[k];
            if (!(d > 0.0))
                throw NotPositiveDefiniteError("chol_dense: non-positive pivot", j);
            const double djj = std::sqrt(d);
            lj[j] = djj;
            for (index_t i = j + 1; i < k1; ++i) {
                double* li = l.row(i);
                double s = li[j];
                for (index_t k = k0; k < j; ++k) s -= li[k] * lj[k];
                li[j] = s / djj;
            }
        }
    };

    for (index_t k0 = 0; k0 < n; k0 += nb) {
        const index_t k1 = std::min(k0 + nb, n);
        potf2(k0, k1);
        // panel: rows below the diagonal block, L21 = A21 * L11^{-T}
        for (index_t i = k1; i < n; ++i) {
            double* li = l.row(i);
            for (index_t j = k0; j < k1; ++j) {
                const double* lj = l.row(j);
                double s = li[j];
                for (index_t k = k0; k < j; ++k) s -= li[k] * lj[k];
                li[j] = s / lj[j];
            }
        }
        // trailing update: A22 -= L21 * L21', lower part only
        for (index_t i = k1; i < n; ++i) {
            const double* li = l.row(i);
            for (index_t j = k1; j <= i; ++j) {
                const double* lj = l.row(j);
                double s = 0.0;
                for (index_t k = k0; k < k1; ++k) s += li[k] * lj[k];
                l(i, j) -= s;
            }
        }
    }
    // zero the strict upper triangle so the result is a clean lower factor
    for (index_t i = 0; i < n; ++i)
        for (index_t j = i + 1; j < n; ++j) l(i, j) = 0.0;
    return l;
}

Vector dense_lower_solve(const DenseMatrix& l, const Vector& b) {
    const index_t n = l.rows();
    if (static_cast<index_t>(b.size()) != n)
        throw DimensionError("dense_lower_solve: dimension mismatch");
    Vector x = b;
    for (index_t i = 0; i < n; ++i) {
        const double* li = l.row(i);
        double s = x[static_cast<std::size_t>(i)];
        for (index_t j = 0; j < i; ++j) s -= li[j] * x[static_cast<std::size_t>(j)];
        if (li[i] == 0.0 || std::fpclassify(li[i]) == FP_SUBNORMAL)
            throw SingularFactorError("dense_lower_solve: bad diagonal", i);
        x[static_cast<std::size_t>(i)] = s / li[i];
    }
    return x;
}

Vector dense_lower_transpose_solve(const DenseMatrix& l, const Vector& b) {
    const index_t n = l.rows();
    if (static_cast<index_t>(b.size()) != n)
        throw DimensionError("dense_lower_transpose_solve: dimension mismatch");
    Vector x = b;
    for (index_t i = n - 1; i >= 0; --i) {
        const double* li = l.row(i);
        if (li[i] == 0.0 || std::fpclassify(li[i]) == FP_SUBNORMAL)
            throw SingularFactorError("dense_lower_transpose_solve: bad diagonal", i);
        const double xi = x[static_cast<std::size_t>(i)] / li[i];
        x[static_cast<std::size_t>(i)] = xi;
        for (index_t j = 0; j < i; ++j) x[static_cast<std::size_t>(j)] -= li[j] * xi;
    }
    return x;
}

Vector dense_chol_solve(const DenseMatrix& l, const Vector& b) {
    return dense_lower_transpose_solve(l, dense_lower_solve(l, b));
}

LowerFactor ichol_threshold(const SparseMatrix& m, double tau, DropRule rule) {
    const index_t n = m.rows();
    if (m.rows() != m.cols()) throw DimensionError("ichol_threshold: matrix not square");
    if (tau < 0.0) throw DimensionError("ichol_threshold: tau must be >= 0");

    // column norms of the input (columns == rows for symmetric input)
    Vector colnorm(static_cast<std::size_t>(n), 0.0);
    for (double& c : colnorm) c = 0.0;
    for (index_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (index_t k = m.row_ptr()[static_cast<std::size_t>(i)];
             k < m.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            const double v = m.values()[static_cast<std::size_t>(k)];
            s += v * v;
        }
        colnorm[static_cast<std::size_t>(i)] = std::sqrt(s);
    }

    struct Entry {
        index_t row;
        double value;
    };
    std::vector<std::vector<Entry>> cols(static_cast<std::size_t>(n));
    Vector diag(static_cast<std::size_t>(n), 0.0);
    // rowlist[i]: (column k, position of L(i,k) inside cols[k]); appended in
    // ascending k as columns finish
    struct RowRef {
        index_t col;
        index_t pos;
    };
    std::vector<std::vector<RowRef>> rowlist(static_cast<std::size_t>(n));

    Vector w(static_cast<std::size_t>(n), 0.0);
    std::vector<index_t> touched;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    auto touch = [&](index_t i) {
        if (!seen[static_cast<std::size_t>(i)]) {
            seen[static_cast<std::size_t>(i)] = 1;
            touched.push_back(i);
        }
    };

    for (index_t j = 0; j < n; ++j) {
        touched.clear();
        // load lower part of column j of M (row j, entries at or right of the
        // diagonal, by symmetry)
        for (index_t k = m.row_ptr()[static_cast<std::size_t>(j)];
             k < m.row_ptr()[static_cast<std::size_t>(j) + 1]; ++k) {
            const index_t c = m.col_idx()[static_cast<std::size_t>(k)];
            if (c >= j) {
                w[static_cast<std::size_t>(c)] = m.values()[static_cast<std::size_t>(k)];
                touch(c);
            }
        }
        // left-looking update from every finished column k with L(j,k) != 0
        for (const RowRef& ref : rowlist[static_cast<std::size_t>(j)]) {
            const auto& ck = cols[static_cast<std::size_t>(ref.col)];
            const double ljk = ck[static_cast<std::size_t>(ref.pos)].value;
            for (std::size_t p = static_cast<std::size_t>(ref.pos); p < ck.size(); ++p) {
                const index_t i = ck[p].row;
                touch(i);
                w[static_cast<std::size_t>(i)] -= ljk * ck[p].value;
            }
        }
        const double d = w[static_cast<std::size_t>(j)];
        if (!(d > 0.0)) {
            for (index_t i : touched) {
                w[static_cast<std::size_t>(i)] = 0.0;
                seen[static_cast<std::size_t>(i)] = 0;
            }
            throw NotPositiveDefiniteError("ichol_threshold: breakdown", j);
        }
        const double ljj = std::sqrt(d);
        diag[static_cast<std::size_t>(j)] = ljj;
        const double threshold =
            rule == DropRule::relative ? tau * colnorm[static_cast<std::size_t>(j)] : tau;

        std::sort(touched.begin(), touched.end());
        auto& cj = cols[static_cast<std::size_t>(j)];
        for (index_t i : touched) {
            if (i > j) {
                const double v = w[static_cast<std::size_t>(i)] / ljj;
                if (std::abs(v) >= threshold && v != 0.0) cj.push_back({i, v});
            }
            w[static_cast<std::size_t>(i)] = 0.0;
            seen[static_cast<std::size_t>(i)] = 0;
        }
        for (std::size_t p = 0; p < cj.size(); ++p)
            rowlist[static_cast<std::size_t>(cj[p].row)].push_back({j, static_cast<index_t>(p)});
    }

    // assemble CSR rows: strictly-lower refs are already in ascending column
    // order, diagonal goes last
    RowBuilder lb(n, n);
    for (index_t i = 0; i < n; ++i) {
        for (const RowRef& ref : rowlist[static_cast<std::size_t>(i)])
            lb.add(ref.col, cols[static_cast<std::size_t>(ref.col)][static_cast<std::size_t>(ref.pos)].value);
        lb.add(i, diag[static_cast<std::size_t>(i)]);
        lb.finish_row();
    }
    LowerFactor f;
    f.L = lb.build();
    f.kind = tau == 0.0 ? FactorKind::exact_cholesky : FactorKind::incomplete_cholesky;
    f.drop_tolerance = tau;
    return f;
}

IcholShifted ichol_with_shift(const SparseMatrix& m, double tau, DropRule rule) {
    IcholShifted out;
    double alpha = 0.0;
    for (int attempt = 0;; ++attempt) {
        try {
            if (alpha == 0.0) {
                out.factor = ichol_threshold(m, tau, rule);
            } else {
                Vector d = m.extract_diagonal();
                std::vector<Triplet> shift_ts;
                shift_ts.reserve(d.size());
                for (index_t i = 0; i < m.rows(); ++i)
                    shift_ts.push_back({i, i, alpha * d[static_cast<std::size_t>(i)]});
                // M + alpha*diag(M)
                std::vector<Triplet> ts = shift_ts;
                for (index_t i = 0; i < m.rows(); ++i)
                    for (index_t k = m.row_ptr()[static_cast<std::size_t>(i)];
                         k < m.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
                        ts.push_back({i, m.col_idx()[static_cast<std::size_t>(k)],
                                      m.values()[static_cast<std::size_t>(k)]});
                out.factor = ichol_threshold(
                    SparseMatrix::from_triplets(m.rows(), m.cols(), std::move(ts)), tau, rule);
            }
            out.shift = alpha;
            out.retries = attempt;
            return out;
        } catch (const NotPositiveDefiniteError&) {
            if (attempt >= 10) throw;
            alpha = alpha == 0.0 ? 1e-3 : 2.0 * alpha;
        }
    }
}

BlockDiagCholesky::BlockDiagCholesky(const SparseMatrix& a, index_t max_dense_block) {
    if (a.rows() != a.cols()) throw DimensionError("BlockDiagCholesky: matrix not square");
    dim_ = a.rows();
    // connected components of the sparsity graph via union-find
    std::vector<index_t> parent(static_cast<std::size_t>(dim_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](index_t x) {
        index_t root = x;
        while (parent[static_cast<std::size_t>(root)] != root)
            root = parent[static_cast<std::size_t>(root)];
        while (parent[static_cast<std::size_t>(x)] != root) {
            index_t next = parent[static_cast<std::size_t>(x)];
            parent[static_cast<std::size_t>(x)] = root;
            x = next;
        }
        return root;
    };
    for (index_t i = 0; i < dim_; ++i)
        for (index_t k = a.row_ptr()[static_cast<std::size_t>(i)];
             k < a.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            const index_t j = a.col_idx()[static_cast<std::size_t>(k)];
            const index_t ri = find(i), rj = find(j);
            if (ri != rj) parent[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
        }

    std::vector<std::vector<index_t>> groups;
    std::vector<index_t> group_of(static_cast<std::size_t>(dim_), -1);
    for (index_t i = 0; i < dim_; ++i) {
        const index_t r = find(i);
        if (group_of[static_cast<std::size_t>(r)] < 0) {
            group_of[static_cast<std::size_t>(r)] = static_cast<index_t>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(group_of[static_cast<std::size_t>(r)])].push_back(i);
    }

    inv_scalar_.assign(static_cast<std::size_t>(dim_), 0.0);
    for (auto& g : groups) {
        if (g.size() == 1) {
            const index_t i = g[0];
            const double d = a.coeff(i, i);
            if (!(d > 0.0))
                throw NotPositiveDefiniteError("BlockDiagCholesky: non-positive diagonal", i);
            inv_scalar_[static_cast<std::size_t>(i)] = 1.0 / d;
            ++singleton_count_;
            continue;
        }
        const index_t bn = static_cast<index_t>(g.size());
        if (bn > max_dense_block)
            throw DimensionError("BlockDiagCholesky: connected block exceeds dense limit");
        largest_block_ = std::max(largest_block_, bn);
        std::vector<index_t> pos(static_cast<std::size_t>(dim_), -1);
        for (index_t t = 0; t < bn; ++t) pos[static_cast<std::size_t>(g[static_cast<std::size_t>(t)])] = t;
        DenseMatrix sub(bn, bn);
        for (index_t t = 0; t < bn; ++t) {
            const index_t i = g[static_cast<std::size_t>(t)];
            for (index_t k = a.row_ptr()[static_cast<std::size_t>(i)];
                 k < a.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
                const index_t j = a.col_idx()[static_cast<std::size_t>(k)];
                sub(t, pos[static_cast<std::size_t>(j)]) = a.values()[static_cast<std::size_t>(k)];
            }
        }
        Block blk;
        blk.idx = std::move(g);
        blk.chol = chol_dense(sub);
        blocks_.push_back(std::move(blk));
    }
}

Vector BlockDiagCholesky::solve(const Vector& b) const {
    if (static_cast<index_t>(b.size()) != dim_)
        throw DimensionError("BlockDiagCholesky::solve: dimension mismatch");
    Vector x(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) x[i] = b[i] * inv_scalar_[i];
    Vector sub, sol;
    for (const Block& blk : blocks_) {
        sub.resize(blk.idx.size());
        for (std::size_t t = 0; t < blk.idx.size(); ++t)
            sub[t] = b[static_cast<std::size_t>(blk.idx[t])];
        sol = dense_chol_solve(blk.chol, sub);
        for (std::size_t t = 0; t < blk.idx.size(); ++t)
            x[static_cast<std::size_t>(blk.idx[t])] = sol[t];
    }
    return x;
}

}  // namespace dsp
