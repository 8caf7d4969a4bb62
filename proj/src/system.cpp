#include "dsp/system.hpp"

#include "dsp/rng.hpp"
#include "dsp/vec.hpp"

namespace dsp {

void BlockSaddleSystem::validate() const {
    if (A.rows() != n || A.cols() != n) throw DimensionError("system: A is not n x n");
    if (B.rows() != m || B.cols() != n) throw DimensionError("system: B is not m x n");
    if (C.rows() != l || C.cols() != m) throw DimensionError("system: C is not l x m");
}

SparseMatrix assemble_saddle(const BlockSaddleSystem& sys) {
    sys.validate();
    const index_t n = sys.n, m = sys.m, l = sys.l;
    const SparseMatrix bt = transpose(sys.B);
    const SparseMatrix ct = transpose(sys.C);

    RowBuilder out(n + m + l, n + m + l);
    for (index_t i = 0; i < n; ++i) {
        for (index_t k = sys.A.row_ptr()[static_cast<std::size_t>(i)];
             k < sys.A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
            out.add(sys.A.col_idx()[static_cast<std::size_t>(k)],
                    sys.A.values()[static_cast<std::size_t>(k)]);
        for (index_t k = bt.row_ptr()[static_cast<std::size_t>(i)];
             k < bt.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
            out.add(n + bt.col_idx()[static_cast<std::size_t>(k)],
                    bt.values()[static_cast<std::size_t>(k)]);
        out.finish_row();
    }
    for (index_t i = 0; i < m; ++i) {
        for (index_t k = sys.B.row_ptr()[static_cast<std::size_t>(i)];
             k < sys.B.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
            out.add(sys.B.col_idx()[static_cast<std::size_t>(k)],
                    sys.B.values()[static_cast<std::size_t>(k)]);
        for (index_t k = ct.row_ptr()[static_cast<std::size_t>(i)];
             k < ct.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
            out.add(n + m + ct.col_idx()[static_cast<std::size_t>(k)],
                    ct.values()[static_cast<std::size_t>(k)]);
        out.finish_row();
    }
    for (index_t i = 0; i < l; ++i) {
        for (index_t k = sys.C.row_ptr()[static_cast<std::size_t>(i)];
             k < sys.C.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
            out.add(n + sys.C.col_idx()[static_cast<std::size_t>(k)],
                    sys.C.values()[static_cast<std::size_t>(k)]);
        out.finish_row();
    }
    return out.build();
}

Vector saddle_apply(const BlockSaddleSystem& sys, const Vector& w) {
    const index_t n = sys.n, m = sys.m, l = sys.l;
    if (static_cast<index_t>(w.size()) != n + m + l)
        throw DimensionError("saddle_apply: vector length mismatch");
    Vector w1, w2, w3;
    split3(w, n, m, l, w1, w2, w3);

    Vector y1 = spmv(sys.A, w1);
    spmv_add(sys.B, w2, 1.0, y1, /*transpose=*/true);
    Vector y2 = spmv(sys.B, w1);
    spmv_add(sys.C, w3, 1.0, y2, /*transpose=*/true);
    Vector y3 = spmv(sys.C, w2);
    return join3(y1, y2, y3);
}

RhsResult make_rhs(const BlockSaddleSystem& sys, const RhsSpec& spec) {
    const index_t total = sys.order();
    Vector w_star;
    if (spec.kind == RhsKind::unit_solution) {
        w_star.assign(static_cast<std::size_t>(total), 1.0);
    } else {
        Rng rng(spec.seed);
        w_star = rng.uniform_vector(total);
    }
    Vector b = saddle_apply(sys, w_star);
    return {std::move(b), std::move(w_star)};
}

}  // namespace dsp
