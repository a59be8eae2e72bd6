#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace bellclass {

/// Seeded generator with platform-independent real-valued draws.
///
/// std::*_distribution output is implementation-defined, so the conversions
/// from raw 64-bit words are done here to keep reports bit-identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (master seed, stream index), e.g. one per shard.
  static Rng derive(std::uint64_t master, std::uint64_t stream) {
    return Rng(splitmix(splitmix(master) ^ (stream * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL)));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unit-rate exponential.
  double exponential() { return -std::log1p(-uniform()); }

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bellclass
