#ifndef UKLAB_RNG_HPP
#define UKLAB_RNG_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace uklab {

/// splitmix64: small, fast, and identical on every platform.  All
/// randomness in the project flows through explicit seeds so reruns are
/// reproducible bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) without modulo bias (bound > 0).
  uint64_t next_below(uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  uint64_t state_;
};

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Deterministic substream derivation: master seed + stream label.
inline uint64_t derive_seed(uint64_t master, std::string_view label) {
  SplitMix64 g(master ^ fnv1a64(label));
  return g.next_u64();
}

inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  SplitMix64 g(master ^ (0x9e3779b97f4a7c15ull * (index + 1)));
  return g.next_u64();
}

}  // namespace uklab

#endif  // UKLAB_RNG_HPP
