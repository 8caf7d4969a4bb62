#pragma once

/// @file spectrum.hpp
/// @brief Dense materialization of preconditioned operators and their
/// spectra. Left (Q^{-1} A) and right (A Q^{-1}) forms carry the same
/// eigenvalues; both are available.

#include "dsp/bounds.hpp"
#include "dsp/eig.hpp"
#include "dsp/precond.hpp"
#include "dsp/system.hpp"

namespace dsp {

enum class PrecondSide { left, right };

/// Applies the preconditioner to every column of the assembled matrix (left)
/// or the assembled matrix to every preconditioned unit vector (right).
/// Columns are independent and processed in parallel.
DenseMatrix form_preconditioned_dense(const SparseMatrix& assembled,
                                      const LinearOperator& precond,
                                      PrecondSide side, int threads = 0);

struct SpectrumOptions {
    PrecondSide side = PrecondSide::left;
    index_t max_order = 2500;  // dense guard
    int threads = 0;           // 0: hardware concurrency
    EigOptions eig;
};

/// Spectrum of the exact preconditioned matrix.
Spectrum preconditioned_spectrum(const BlockSaddleSystem& sys,
                                 const PreconditionerKind& kind,
                                 const ExactSchurSet& es,
                                 const SpectrumOptions& opts = {});

/// Spectrum of the inexact preconditioned matrix. The inner tolerance is
/// tightened (1e-12) so the applied operator is effectively linear.
Spectrum preconditioned_spectrum(const BlockSaddleSystem& sys,
                                 const PreconditionerKind& kind,
                                 const ApproximationSet& ap,
                                 const ApplyOptions& apply_opts,
                                 const SpectrumOptions& opts = {});

/// Spectrum of the simplified-variant preconditioned matrix.
Spectrum preconditioned_spectrum(const BlockSaddleSystem& sys, PrecondTag tag,
                                 const SimplifiedSet& ss,
                                 const SpectrumOptions& opts = {});

}  // namespace dsp
