#pragma once

#include <cstdint>
#include <random>

namespace vanetmac {

/// Seeded random stream with portable bounded draws. std::uniform_*_distribution
/// is implementation-defined, so draws are derived directly from the engine
/// output to keep traces identical across standard libraries.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Seed for independent stream `stream` of a run seeded with `seed` (splitmix64 mix).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be >= 1.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  friend bool operator==(const DeterministicRng&, const DeterministicRng&) = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace vanetmac
