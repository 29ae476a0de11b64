#pragma once

#include <cstdint>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace dhtsim {

// Keys are plain integers in [0, m); a key doubles as the node identity.
using Key = uint64_t;
using Distance = uint64_t;

struct RingParams {
  uint64_t m = 0;  // key positions on the ring
  uint64_t n = 0;  // live nodes
};

void validate(const RingParams& p);  // throws invalid_argument unless 2 <= n <= m

// Circular distance min(|a-b|, m-|a-b|); symmetric, at most m/2.
inline Distance ring_distance(Key a, Key b, uint64_t m) {
  Distance d = a > b ? a - b : b - a;
  return d <= m - d ? d : m - d;
}
inline Distance ring_distance(Key a, Key b, const RingParams& p) {
  return ring_distance(a, b, p.m);
}

// Number of keys at circular distance d from a fixed key: 2, except the
// antipode of an even ring which is reachable one way only.
inline uint64_t multiplicity(Distance d, uint64_t m) { return 2 * d == m ? 1 : 2; }

// Inverse-distance shortcut sampler. A distance d in [1, m/2] is drawn with
// probability multiplicity(d)/d / z via exact inverse-CDF lookup on a
// cumulative weight table built once per ring size, then the side is chosen
// uniformly. No truncation: every distance carries its full mass.
class HarmonicSampler {
 public:
  explicit HarmonicSampler(uint64_t m);

  uint64_t ring_size() const { return m_; }
  double normalizer() const { return z_; }  // sum of 1/dist over the m-1 other keys

  // Probability that a sampled target sits at circular distance d (both sides).
  double pmf_distance(Distance d) const;
  // Probability of one specific key at distance d:  (1/d)/z.
  double pmf_position(Distance d) const;

  Distance sample_distance(Rng& rng) const;
  Key sample_target(Key from, Rng& rng) const;

 private:
  uint64_t m_ = 0;
  double z_ = 0.0;
  std::vector<double> cum_;  // cum_[d-1] = sum of weights for distances 1..d
};

// z for the given ring; grows like log(m).
double harmonic_normalizer(const RingParams& p);

// Convenience one-shot draw (builds a sampler per call; hot paths should hold
// a HarmonicSampler instead).
Key sample_shortcut_target(Key k, const RingParams& p, Rng& rng);

}  // namespace dhtsim
