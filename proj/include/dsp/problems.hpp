#pragma once

/// @file problems.hpp
/// @brief Generators for the two benchmark problems.

#include <cstdint>

#include "dsp/system.hpp"

namespace dsp {

/// The printed diagonal formulas d2/d3 contain exponents that would make D2
/// indefinite; `squared` reads them as 1e-5*(j -+ p1)^2, which keeps A SPD
/// and is the default. `literal` reproduces the printed 1e-5*(j -+ p1^2).
enum class DFormulaVariant { squared, literal };

struct Example1Options {
    DFormulaVariant d_formula = DFormulaVariant::squared;
};

/// Structured problem: A = blockdiag(2W'W + I, D2, D3) with W a Gaussian
/// outer product, B = [E, -I, I], C = E', E stacked from E1 (x) I_p and
/// I_p (x) E1. Sizes n = 5p^2+p, m = 2p^2, l = p^2+p.
BlockSaddleSystem gen_example1(index_t p, const Example1Options& opts = {});

/// The p x (p+1) bidiagonal block with 2 on the diagonal and -1 above.
SparseMatrix example1_e1(index_t p);

/// Random problem: A diagonal with sorted spectrum in [0.1, 11.1), first ten
/// entries tied; B, C dense uniform(0,1). Deterministic in seed; if B or C
/// comes out rank-deficient the draw is retried with seed+1 and the seed
/// actually used is reported through used_seed.
BlockSaddleSystem gen_example2(index_t n, index_t m, index_t l, std::uint64_t seed,
                               std::uint64_t* used_seed = nullptr);

}  // namespace dsp
