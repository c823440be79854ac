#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gradreg {

/// SplitMix64 finalizer over (master, index). Streams derived for distinct
/// indices are statistically independent, so sweep runs can be seeded
/// order-independently from a single master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic sampler with a fully documented identity: the raw stream is
/// std::mt19937_64 (bit-specified by the standard), uniforms take the top 53
/// bits, and normals use the plain Box-Muller transform. No stdlib
/// distribution adaptors, so byte-identical output across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on (0, 1]: ((x >> 11) + 1) * 2^-53.
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal(double mean, double stddev) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * radius * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gradreg
