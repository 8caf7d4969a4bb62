#pragma once

/// @file rng.hpp
/// @brief Seedable, portable uniform random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; doubles are derived with the (x >> 11) * 2^-53 mapping rather
/// than std::uniform_real_distribution, which is implementation-defined.
/// Same seed, same bits, on every platform.

#include <cstdint>
#include <random>

#include "dsp/types.hpp"

namespace dsp {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Vector uniform_vector(index_t n) {
        Vector v(static_cast<std::size_t>(n));
        for (double& x : v) x = uniform();
        return v;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace dsp
