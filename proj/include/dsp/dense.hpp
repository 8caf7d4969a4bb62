#pragma once

/// @file dense.hpp
/// @brief Row-major dense matrices. Dense kernels double as the test oracles
/// for every sparse kernel at desk scale.

#include <vector>

#include "dsp/types.hpp"

namespace dsp {

class SparseMatrix;

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(index_t rows, index_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), fill) {}

    static DenseMatrix identity(index_t n);
    static DenseMatrix from_sparse(const SparseMatrix& m);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }

    double& operator()(index_t i, index_t j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
    double operator()(index_t i, index_t j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }

    double* row(index_t i) { return a_.data() + i * cols_; }
    const double* row(index_t i) const { return a_.data() + i * cols_; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> a_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
Vector multiply(const DenseMatrix& a, const Vector& x);

double max_abs(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// ||A - A'||_max
double symmetry_gap(const DenseMatrix& a);

/// Gauss-Jordan inverse with partial pivoting (oracle use only).
DenseMatrix dense_inverse(const DenseMatrix& a);

/// Numerical rank by Gaussian elimination with full pivoting (oracle use).
index_t dense_rank(DenseMatrix a, double rel_tol = 1e-10);

}  // namespace dsp
