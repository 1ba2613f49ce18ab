#pragma once

#include <cstdint>
#include <random>

namespace gpland {

// Deterministic RNG shared by every stochastic component. std::mt19937_64 is
// fully specified by the standard, and doubles are assembled from the top 53
// bits directly, so a fixed integer seed yields the same sequence on any
// platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, bound), bound >= 1, by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
  }

  // Independent substream for parallel chains / repeated experiments. The
  // derived seed is splitmix64(seed ^ (stream + 1) * phi64), a documented,
  // platform-independent mixing function.
  static Rng fork(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed ^ ((stream + 1) * 0x9E3779B97F4A7C15ULL);
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
    return Rng(z);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gpland
