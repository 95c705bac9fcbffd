#pragma once

#include <cstdint>

namespace picomp {

// splitmix64: tiny, portable, deterministic across platforms.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform draw in [0, n); n must be positive.
  size_t below(size_t n) { return static_cast<size_t>(next() % n); }

  bool chance(uint32_t num, uint32_t den) { return below(den) < num; }
};

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  SplitMix64 s(a ^ (0x9e3779b97f4a7c15ull + (b << 6) + (b >> 2)));
  s.next();
  return s.next() ^ b;
}

}  // namespace picomp
