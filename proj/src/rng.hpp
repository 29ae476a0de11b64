#pragma once

#include <cstdint>

namespace dhtsim {

// splitmix64, used only to expand seeds into generator state
// (Vigna's public-domain reference).
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

// Named substreams of one experiment seed. Each (seed, stream, salt)
// triple is an independent generator, so e.g. changing how many probe
// queries run per step cannot perturb the adaptive-update draws.
enum class Stream : uint64_t {
  build = 0,
  adaptive = 1,
  probes = 2,
  control_build = 3,
  control_probes = 4,
  churn = 5,
  links = 6,
  queries = 7,
};

// xoshiro256** 1.0 (Blackman & Vigna, public-domain reference), with the
// state expanded from (seed, stream, salt) via splitmix64:
//   sm = splitmix64(seed ^ GOLDEN*(stream+1) ^ MIX*salt); s[i] = sm.next()
// Bounded draws use rejection sampling, so every draw is exact and the
// whole scheme is reproducible across implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed, Stream stream = Stream::build, uint64_t salt = 0) {
    SplitMix64 sm(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<uint64_t>(stream) + 1)) ^
                  (0xBF58476D1CE4E5B9ULL * salt));
    for (auto& w : s_) w = sm.next();
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform integer in [0, bound), unbiased (rejection below 2^64 mod bound).
  uint64_t below(uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    uint64_t x;
    do {
      x = next();
    } while (x < threshold);
    return x % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool coin(double p) { return uniform01() < p; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace dhtsim
