#pragma once

// Platform-independent uniform draws from a seeded 64-bit Mersenne twister.
// The standard distributions are implementation-defined, so bit-identical
// runs across standard libraries need the conversion spelled out.

#include <cstdint>
#include <random>

namespace fracsob {

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform double in [lo, hi).
inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

}  // namespace fracsob
