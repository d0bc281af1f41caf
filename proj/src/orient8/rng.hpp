#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace orient8 {

// Deterministic RNG wrapper. std::mt19937 output is pinned by the standard,
// but the std::*_distribution adaptors are not, so every draw that can reach
// an output artifact goes through the hand-rolled conversions below.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(static_cast<uint32_t>(seed ^ (seed >> 32))) {}

  uint32_t next_u32() { return gen_(); }

  // Uniform in [0, 1) with 24 bits of randomness (exact in float).
  float uniform() { return static_cast<float>(next_u32() >> 8) * 0x1.0p-24f; }

  float uniform(float lo, float hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller.
  float normal() {
    float u1 = uniform();
    float u2 = uniform();
    if (u1 < 1e-12f) u1 = 1e-12f;
    return std::sqrt(-2.0f * std::log(u1)) *
           std::cos(6.28318530717958647692f * u2);
  }

  // Uniform integer in [0, n). Modulo bias is < 2^-24 for the n used here.
  uint32_t bounded(uint32_t n) { return n ? next_u32() % n : 0; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = bounded(static_cast<uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937 gen_;
};

// splitmix64 mix for deriving stream seeds from (seed, indices...).
inline uint64_t mix_seed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0,
                            uint64_t c = 0) {
  return mix_seed(mix_seed(mix_seed(mix_seed(seed) ^ a) ^ b) ^ c);
}

}  // namespace orient8
