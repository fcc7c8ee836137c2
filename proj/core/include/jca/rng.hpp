#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace jca {

/// Seeded generator with distribution code written out here, so sampled values
/// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller, one value per call).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  /// Derives an independent child stream (splitmix64 of seed and tag).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag);

 private:
  std::mt19937_64 engine_;
};

}  // namespace jca
