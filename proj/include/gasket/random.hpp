#pragma once

#include <cstdint>
#include <random>

namespace gasket {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent engine for trial `stream` of a run seeded with `seed`.
/// mt19937_64 output is fixed by the standard, so streams are portable.
inline std::mt19937_64 make_stream_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 1)));
}

/// Uniform double in [0, 1) from the top 53 bits (std distributions are not
/// specified bit-for-bit across standard libraries).
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace gasket
