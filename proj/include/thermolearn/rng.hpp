#pragma once

#include <cstdint>
#include <random>

namespace thermo {

// Seeded RNG with platform-independent uniform draws. std::mt19937_64 has a
// standard-specified bit stream; std::uniform_real_distribution does not, so
// the [0,1) mapping is done by hand to keep runs byte-reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Independent child stream for a labelled sub-task.
  Rng fork(std::uint64_t stream) {
    // SplitMix64 finalizer mixes (seed-derived state, stream label).
    std::uint64_t z = next_u64() + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace thermo
