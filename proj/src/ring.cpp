#include "ring.hpp"

#include <algorithm>
#include <string>

namespace dhtsim {

void validate(const RingParams& p) {
  if (p.m < 2) fail(Status::invalid_argument, "ring size must be at least 2, got " + std::to_string(p.m));
  if (p.n < 2 || p.n > p.m)
    fail(Status::invalid_argument,
         "node count must satisfy 2 <= n <= m, got n=" + std::to_string(p.n) + " m=" + std::to_string(p.m));
}

HarmonicSampler::HarmonicSampler(uint64_t m) : m_(m) {
  if (m < 2) fail(Status::invalid_argument, "harmonic sampler needs ring size >= 2");
  const uint64_t dmax = m / 2;
  cum_.resize(dmax);
  double acc = 0.0;
  for (uint64_t d = 1; d <= dmax; ++d) {
    acc += static_cast<double>(multiplicity(d, m)) / static_cast<double>(d);
    cum_[d - 1] = acc;
  }
  z_ = acc;
}

double HarmonicSampler::pmf_distance(Distance d) const {
  if (d == 0 || d > m_ / 2) return 0.0;
  return static_cast<double>(multiplicity(d, m_)) / static_cast<double>(d) / z_;
}

double HarmonicSampler::pmf_position(Distance d) const {
  if (d == 0 || d > m_ / 2) return 0.0;
  return 1.0 / static_cast<double>(d) / z_;
}

Distance HarmonicSampler::sample_distance(Rng& rng) const {
  const double u = rng.uniform01() * z_;
  auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) --it;
  return static_cast<Distance>(it - cum_.begin()) + 1;
}

Key HarmonicSampler::sample_target(Key from, Rng& rng) const {
  const Distance d = sample_distance(rng);
  if (multiplicity(d, m_) == 2 && (rng.next() & 1)) return (from + m_ - d) % m_;
  return (from + d) % m_;
}

double harmonic_normalizer(const RingParams& p) {
  if (p.m < 2) fail(Status::invalid_argument, "invalid ring: m must be >= 2");
  return HarmonicSampler(p.m).normalizer();
}

Key sample_shortcut_target(Key k, const RingParams& p, Rng& rng) {
  return HarmonicSampler(p.m).sample_target(k, rng);
}

}  // namespace dhtsim
