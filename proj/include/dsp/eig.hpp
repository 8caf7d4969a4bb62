#pragma once

/// @file eig.hpp
/// @brief Dense eigensolvers: balancing + Householder Hessenberg + Francis
/// implicit double-shift QR for general matrices, and Householder
/// tridiagonalization + implicit QL for symmetric pencils.

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "dsp/dense.hpp"
#include "dsp/sparse.hpp"
#include "dsp/types.hpp"

namespace dsp {

struct Spectrum {
    std::vector<std::complex<double>> values;
    std::string source;
};

struct EigOptions {
    /// Backward-error spot check via inverse iteration on a sample of
    /// eigenvalues; skipped above the order cap (the check costs a complex
    /// LU per sampled eigenvalue).
    bool residual_check = true;
    index_t residual_check_max_order = 600;
    int residual_sample = 5;
    double residual_tol = 1e-6;
};

/// All eigenvalues of a general real square matrix.
/// Throws ConvergenceError if the QR sweep exceeds 30 * order iterations.
Spectrum eig_dense(const DenseMatrix& m, const EigOptions& opts = {});

/// Eigenvalues of a symmetric matrix (sorted ascending).
std::vector<double> eig_symmetric(DenseMatrix m);

/// Extreme eigenvalues of N^{-1} M for symmetric M and SPD N, computed from
/// the congruent symmetric form L^{-1} M L^{-T} with N = L L'.
std::pair<double, double> eig_sym_pencil_extremes(const DenseMatrix& msym,
                                                  const DenseMatrix& nspd);
std::pair<double, double> eig_sym_pencil_extremes(const SparseMatrix& msym,
                                                  const SparseMatrix& nspd);

/// max over sampled eigenvalues of ||M v - lambda v|| / ||M||_F with v
/// re-derived by inverse iteration. Oracle/diagnostic helper.
double eig_residual_spot_check(const DenseMatrix& m,
                               const std::vector<std::complex<double>>& values,
                               int sample);

}  // namespace dsp
