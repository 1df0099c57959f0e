#pragma once

/**
 * @file rng.hpp
 * @brief Seeded pseudo-random stream with a portable, fixed algorithm.
 *
 * The generator is SplitMix64 (Steele, Lea & Flood 2014): a single 64-bit
 * word of state advanced by a Weyl increment and finalized with the
 * murmur-style mixer. Uniform doubles take the top 53 bits; normals come
 * from the Box-Muller transform. Everything is specified bit-for-bit, so
 * the same seed reproduces the same variate sequence on any platform —
 * unlike std::normal_distribution, whose output is implementation-defined.
 *
 * Streams are plain values. Substreams for independent work items are
 * derived by hashing (seed, key...) tuples, which keeps per-particle
 * noise assignment independent of iteration order.
 */

#include <cmath>
#include <cstdint>

namespace nemasoh {

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  /// Derive a substream keyed by up to three indices (e.g. step, particle).
  static RngStream from_keys(std::uint64_t seed, std::uint64_t k1,
                             std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
    std::uint64_t s = seed;
    s = mix(s ^ (k1 + 0x9e3779b97f4a7c15ull));
    s = mix(s ^ (k2 + 0xbf58476d1ce4e5b9ull));
    s = mix(s ^ (k3 + 0x94d049bb133111ebull));
    return RngStream(s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller; the paired variate is cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * pi_ * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr double pi_ = 3.14159265358979323846;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace nemasoh
