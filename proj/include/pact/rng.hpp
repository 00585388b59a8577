#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pact {

// Deterministic RNG wrapper. Uniform/normal draws are built from raw 64-bit
// words so the stream depends only on the seed, not on the standard library's
// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; two words per draw, no cached state.
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // Index in [0, n) drawn from the given cumulative weights (last entry ~ 1).
  std::size_t categorical_from_cdf(const std::vector<double>& cdf) {
    double u = uniform();
    for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
      if (u < cdf[i]) return i;
    }
    return cdf.empty() ? 0 : cdf.size() - 1;
  }

 private:
  std::mt19937_64 gen_;
};

// Stable derivation of child seeds (splitmix64 finalizer on seed ^ f(tag)).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace pact
