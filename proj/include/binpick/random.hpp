#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace binpick {

using Rng = std::mt19937_64;

/// Derives an independent seed for a named stage from the root seed.
/// Adding new stream names never perturbs existing ones.
std::uint64_t stream_seed(std::uint64_t root, std::string_view stream);

/// Same as stream_seed, with an integer sub-index (scene number, record id...).
std::uint64_t stream_seed(std::uint64_t root, std::string_view stream, std::uint64_t index);

inline Rng make_rng(std::uint64_t root, std::string_view stream) { return Rng(stream_seed(root, stream)); }

/// Uniform double in [0, 1) with 53 random bits; independent of the
/// standard library's distribution implementation.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform integer in [0, n).
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace binpick
