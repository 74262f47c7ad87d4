#pragma once

#include <cstdint>

namespace lmexp {

/// SplitMix64 finalizer. Bijective on 64-bit words; the standard constants
/// give full avalanche, so consecutive counters decorrelate completely.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: value i of the stream keyed by `seed`.
/// Pure function of (seed, counter), so any enumeration order, chunking or
/// thread assignment reproduces the same draws.
inline constexpr std::uint64_t stream_value(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed ^ mix64(counter));
}

/// Map 64 random bits to a double in [0, 1) with 53-bit resolution.
inline constexpr double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Derive a child seed from a master seed and two indices (e.g. n and sample).
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(master ^ mix64(a)) ^ mix64(b ^ 0x5851f42d4c957f2dULL));
}

}  // namespace lmexp
