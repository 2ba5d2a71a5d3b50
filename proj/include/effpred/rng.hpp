#pragma once

#include <cstdint>
#include <random>

namespace effpred {

// All sampling in the toolkit goes through std::mt19937_64, whose output
// sequence is fixed by the C++ standard. Distributions are implemented here
// rather than taken from <random> because the standard leaves those
// implementation-defined.

/// SplitMix64 finalizer. Used to derive independent sub-seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for stream `index` under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index));
}

/// Uniform integer in [0, bound) by rejection; bound must be > 0.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(std::mt19937_64& rng);

/// Standard normal deviates by the Box-Muller transform. Each pair of
/// generator outputs (a, b) yields two deviates:
///   u1 = ((a >> 11) + 1) * 2^-53,  u2 = (b >> 11) * 2^-53
///   r  = sqrt(-2 ln u1)
///   z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2)
/// returned in the order z0, z1.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next();

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace effpred
