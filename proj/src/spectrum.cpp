#include "dsp/spectrum.hpp"

#include <algorithm>
#include <thread>

namespace dsp {

DenseMatrix form_preconditioned_dense(const SparseMatrix& assembled,
                                      const LinearOperator& precond,
                                      PrecondSide side, int threads) {
    const index_t n = assembled.rows();
    if (assembled.cols() != n || precond.dim != n)
        throw DimensionError("form_preconditioned_dense: dimension mismatch");
    DenseMatrix out(n, n);

    auto fill_columns = [&](index_t j0, index_t j1) {
        Vector unit(static_cast<std::size_t>(n), 0.0);
        for (index_t j = j0; j < j1; ++j) {
            unit[static_cast<std::size_t>(j)] = 1.0;
            Vector col;
            if (side == PrecondSide::left) {
                col = precond.apply(spmv(assembled, unit));
            } else {
                col = spmv(assembled, precond.apply(unit));
            }
            unit[static_cast<std::size_t>(j)] = 0.0;
            for (index_t i = 0; i < n; ++i)
                out(i, j) = col[static_cast<std::size_t>(i)];
        }
    };

    int nthreads = threads > 0
                       ? threads
                       : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nthreads = std::min<int>(nthreads, 8);
    if (nthreads <= 1 || n < 64) {
        fill_columns(0, n);
        return out;
    }
    std::vector<std::thread> pool;
    const index_t chunk = (n + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
        const index_t j0 = t * chunk;
        const index_t j1 = std::min(n, j0 + chunk);
        if (j0 >= j1) break;
        pool.emplace_back(fill_columns, j0, j1);
    }
    for (auto& th : pool) th.join();
    return out;
}

namespace {

Spectrum spectrum_of(const SparseMatrix& assembled, const LinearOperator& precond,
                     const SpectrumOptions& opts, const std::string& source) {
    if (assembled.rows() > opts.max_order)
        throw DimensionError("preconditioned_spectrum: order exceeds the dense guard (" +
                             std::to_string(opts.max_order) + ")");
    const DenseMatrix dense =
        form_preconditioned_dense(assembled, precond, opts.side, opts.threads);
    Spectrum spec = eig_dense(dense, opts.eig);
    spec.source = source;
    return spec;
}

}  // namespace

Spectrum preconditioned_spectrum(const BlockSaddleSystem& sys,
                                 const PreconditionerKind& kind,
                                 const ExactSchurSet& es,
                                 const SpectrumOptions& opts) {
    const SparseMatrix assembled = assemble_saddle(sys);
    return spectrum_of(assembled, make_exact_precond_operator(kind, es, sys), opts,
                       to_string(kind.tag) + "/exact");
}

Spectrum preconditioned_spectrum(const BlockSaddleSystem& sys,
                                 const PreconditionerKind& kind,
                                 const ApproximationSet& ap,
                                 const ApplyOptions& apply_opts,
                                 const SpectrumOptions& opts) {
    const SparseMatrix assembled = assemble_saddle(sys);
    return spectrum_of(assembled,
                       make_inexact_precond_operator(kind, ap, sys, apply_opts),
                       opts, to_string(kind.tag) + "/inexact");
}

Spectrum preconditioned_spectrum(const BlockSaddleSystem& sys, PrecondTag tag,
                                 const SimplifiedSet& ss,
                                 const SpectrumOptions& opts) {
    const SparseMatrix assembled = assemble_saddle(sys);
    return spectrum_of(assembled, make_simplified_precond_operator(tag, ss, sys),
                       opts, to_string(tag) + "/simplified");
}

}  // namespace dsp
