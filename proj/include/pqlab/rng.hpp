#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace pqlab {

/// Seeded random stream. Platform-independent: only the raw 64-bit engine
/// output is consumed, never the implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for sub-task `index` of a run seeded with `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Index i with probability weights[i] / sum(weights).
  std::size_t pick(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace pqlab
