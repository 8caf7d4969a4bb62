#pragma once

/// @file types.hpp
/// @brief Basic scalar/index types and the error hierarchy.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsp {

using index_t = std::int64_t;
using Vector = std::vector<double>;

/// Incompatible dimensions passed to a kernel.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A factorization hit a non-positive pivot. Carries the pivot index.
class NotPositiveDefiniteError : public std::domain_error {
public:
    NotPositiveDefiniteError(const std::string& what, index_t pivot)
        : std::domain_error(what), pivot_index(pivot) {}
    index_t pivot_index;
};

/// Triangular solve met a zero or sub-normal diagonal entry.
class SingularFactorError : public std::domain_error {
public:
    SingularFactorError(const std::string& what, index_t diag)
        : std::domain_error(what), diag_index(diag) {}
    index_t diag_index;
};

/// CG detected p'Ap <= 0 on an operator that was declared SPD.
class IndefiniteOperatorError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative eigenvalue sweep ran out of its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File parsing / writing failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dsp
