#pragma once

/// @file matrix_market.hpp
/// @brief Matrix Market coordinate I/O (real, general/symmetric) plus plain
/// text and CSV vector I/O.

#include <iosfwd>
#include <string>

#include "dsp/sparse.hpp"
#include "dsp/types.hpp"

namespace dsp {

enum class MmSymmetry { general, symmetric };

SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market_file(const std::string& path);

/// With MmSymmetry::symmetric only the lower triangle is emitted; the matrix
/// must be numerically symmetric in that case.
void write_matrix_market(std::ostream& out, const SparseMatrix& m,
                         MmSymmetry sym = MmSymmetry::general);
void write_matrix_market_file(const std::string& path, const SparseMatrix& m,
                              MmSymmetry sym = MmSymmetry::general);

/// Plain text: one value per line.
Vector read_vector_file(const std::string& path);
void write_vector_file(const std::string& path, const Vector& v);

/// CSV with a header line.
void write_vector_csv(const std::string& path, const Vector& v,
                      const std::string& value_header = "value");

}  // namespace dsp
