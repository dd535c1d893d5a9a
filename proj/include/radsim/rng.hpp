#pragma once

#include <cstdint>

namespace radsim {

// splitmix64 finalizer (Steele/Lea/Flood reference constants)
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based stream: draw i is mix64(key + i*gamma), so a stream keyed by
// (seed, lane indices) yields the same sequence no matter which thread runs it
// or what ran before.
class Rng {
 public:
  explicit Rng(uint64_t key) : key_(key) {}

  static Rng keyed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t k = mix64(seed + kGamma);
    k = mix64(k ^ (a + kGamma));
    k = mix64(k ^ (b + kGamma));
    k = mix64(k ^ (c + kGamma));
    return Rng(k);
  }

  uint64_t next_u64() {
    counter_ += kGamma;
    return mix64(key_ + counter_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ull;
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace radsim
