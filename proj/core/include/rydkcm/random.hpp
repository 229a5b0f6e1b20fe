#pragma once

#include <cstdint>
#include <random>

namespace rydkcm {

using Rng = std::mt19937_64;

/// Independent generator for stream (seed, j, k). Disorder realization j
/// uses (seed, j); trajectory k inside it uses (seed, j, k).
Rng make_rng(std::uint64_t seed, std::uint64_t j = 0, std::uint64_t k = 0);

/// Generator for the two-index stream (seed, j), seeded from four words so it
/// never coincides with a three-index trajectory stream.
Rng make_stream_rng(std::uint64_t seed, std::uint64_t j);

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform double in (0, 1].
inline double uniform_open0(Rng& rng) { return 1.0 - uniform01(rng); }

}  // namespace rydkcm
