#pragma once

/// @file vec.hpp
/// @brief Small dense vector helpers shared by every module.

#include <cmath>
#include <cstddef>

#include "dsp/types.hpp"

namespace dsp {

double dot(const Vector& x, const Vector& y);
double norm2(const Vector& x);
double norm_inf(const Vector& x);

/// y := y + alpha * x
void axpy(double alpha, const Vector& x, Vector& y);

/// x := alpha * x
void scale(double alpha, Vector& x);

Vector subtract(const Vector& x, const Vector& y);

bool all_finite(const Vector& x);

/// Split a stacked (n; m; l) vector into its three blocks.
void split3(const Vector& r, index_t n, index_t m, index_t l,
            Vector& r1, Vector& r2, Vector& r3);

/// Stack three blocks back into one vector.
Vector join3(const Vector& w1, const Vector& w2, const Vector& w3);

}  // namespace dsp
