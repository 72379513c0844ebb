#pragma once

#include <cstdint>

namespace cramer {

// Counter-based generator: the draw for counter n under seed s is the
// SplitMix64 output function applied to s + (n + 1) * golden_gamma. Every
// draw is a pure function of (seed, counter), so streams can be evaluated in
// any order or on any number of threads with identical results.
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter) noexcept {
  return splitmix64_finalize(seed + (counter + 1) * kGoldenGamma);
}

// Uniform on [0, 1) with 53 random bits.
constexpr double uniform01(std::uint64_t seed, std::uint64_t counter) noexcept {
  return static_cast<double>(mix64(seed, counter) >> 11) * 0x1.0p-53;
}

// Seed of the i-th substream (e.g. the i-th ensemble state) of a master seed.
// A second finalizer pass decorrelates substream seeds from the draws made
// directly under the master seed.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64_finalize(mix64(master ^ 0xD1B54A32D192ED03ULL, index));
}

}  // namespace cramer
