#pragma once

/// @file bounds.hpp
/// @brief Spectral bound machinery for the inexact triangular preconditioner:
/// gamma ranges of the three SPD pencils, the complex disc bound, the real
/// eigenvalue intervals (general and simplified variants), the cubic whose
/// roots carry the real eigenvalues, and per-eigenvalue verification.

#include <complex>
#include <optional>
#include <vector>

#include "dsp/eig.hpp"
#include "dsp/precond.hpp"
#include "dsp/system.hpp"
#include "dsp/types.hpp"

namespace dsp {

struct GammaRange {
    double min = 0.0;
    double max = 0.0;
};

/// Extreme eigenvalues of Ahat^{-1}A, Shat^{-1}Stilde, Xhat^{-1}Xtilde with
/// Stilde = B Ahat^{-1} B' and Xtilde = C Shat^{-1} C'.
struct GammaRanges {
    GammaRange a;
    GammaRange s;
    GammaRange x;
};

/// Gamma ranges for the standard approximation set (Ahat = diag(A)). Dense
/// pencil solves; desk scale.
GammaRanges compute_gamma_ranges(const BlockSaddleSystem& sys,
                                 const ApproximationSet& ap,
                                 index_t max_order = 3000);

/// Gamma ranges when only Ahat differs from A (Shat = Stilde, Xhat = Xtilde);
/// gamma_S and gamma_X collapse to 1 up to rounding.
GammaRanges compute_gamma_ranges_simplified(const BlockSaddleSystem& sys,
                                            const SimplifiedSet& ss,
                                            index_t max_order = 3000);

/// Radius sqrt(1 - gamma_min^A) of the Ky = 0 complex branch; 0 when
/// gamma_min^A >= 1 (no complex eigenvalues on that branch).
double complex_disc_bound(double gamma_a_min);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v, double slack = 0.0) const {
        return v >= lo - slack && v <= hi + slack;
    }
};

/// Union of the real-eigenvalue bounds: the Ky != 0 cubic bound, the Ky = 0
/// quadratic bound and the [gamma_min^A, gamma_max^A] branch.
Interval real_interval_general(const GammaRanges& g);

/// Real roots of x^3 - (gA+gS+gX) x^2 + (gS+gX+gA*gX) x - gA*gX, polished by
/// Newton to residual <= 1e-12 (relative to the coefficient scale).
std::vector<double> cubic_real_roots(double ga, double gs, double gx);

/// Unique positive root of x^3 - (2+g) x^2 + (2+g) x - g (bracketed Newton
/// with bisection fallback).
double lambda_plus(double gamma);

enum class BoundVariant { general, simplified };

struct EigenvalueCheck {
    std::complex<double> value;
    bool is_real = false;
    bool pass = false;
};

struct BoundReport {
    BoundVariant variant = BoundVariant::general;
    GammaRanges gammas;
    double complex_radius = 1.0;  // the machine-checked disc |lambda-1| < 1
    double ky0_radius = 0.0;      // sqrt(1-gamma_min^A), informational
    Interval real_interval;       // general: union bound; simplified: sharp
    std::optional<Interval> synthetic_interval;  // simplified variant
    double lambda_plus_min = 0.0;  // simplified variant
    double lambda_plus_max = 0.0;
    bool assumption_one_in_gamma_a = false;
    std::vector<EigenvalueCheck> checks;
    index_t real_count = 0;
    index_t complex_count = 0;
    double real_min = 0.0;  // observed real range
    double real_max = 0.0;
    bool all_pass = true;
};

/// Sharp and synthetic real intervals of the simplified variant; fills
/// lambda_plus_min/max and both intervals of a partial report.
BoundReport simplified_bounds(const GammaRange& gamma_a);

/// Classifies each eigenvalue (|Im| <= 1e-8 * max(1,|lambda|) counts as
/// real), checks complex values against the disc and real values against the
/// interval(s), and aggregates.
BoundReport verify_bounds(const Spectrum& spec, const GammaRanges& g,
                          BoundVariant variant);

}  // namespace dsp
