#pragma once

#include "mjls/types.hpp"

#include <cstdint>
#include <random>

namespace mjls {

/// Deterministic random stream. Uniform doubles are produced from the raw
/// 64-bit engine output so results do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Index draw from a probability vector by inverse CDF in index order.
  int categorical(const Vector& probs) {
    const double u = uniform();
    double cum = 0.0;
    for (Index i = 0; i < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to decorrelate per-trajectory seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream for trajectory `index` under `base_seed`; streams are independent
/// of how many trajectories run or in what order.
inline Rng substream(std::uint64_t base_seed, std::uint64_t index) {
  return Rng(splitmix64(base_seed ^ splitmix64(index)));
}

}  // namespace mjls
