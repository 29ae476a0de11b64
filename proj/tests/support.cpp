#include "support.hpp"

#include <cmath>
#include <sstream>

#include "ring.hpp"

namespace testsupport {

using dhtsim::ring_distance;

Key brute_closest(const std::vector<Key>& live, Key target, uint64_t m) {
  Key best = live.front();
  uint64_t bestd = ring_distance(best, target, m);
  for (Key k : live) {
    const uint64_t d = ring_distance(k, target, m);
    if (d < bestd) {
      best = k;
      bestd = d;
    } else if (d == bestd && (target + d) % m == k) {
      best = k;  // clockwise tie-break
    }
  }
  return best;
}

uint64_t brute_min_distance(const std::vector<Key>& live, Key target, uint64_t m) {
  uint64_t best = UINT64_MAX;
  for (Key k : live) best = std::min(best, ring_distance(k, target, m));
  return best;
}

std::vector<Key> live_vector(const Overlay& o) {
  return {o.live_keys().begin(), o.live_keys().end()};
}

std::string validate_trace(const Overlay& o, const QueryTrace& t) {
  std::ostringstream bad;
  const uint64_t m = o.ring_size();
  if (t.path.empty() || t.path.front() != t.source) bad << "path does not start at the source; ";
  if (t.path.back() != t.terminal) bad << "path does not end at the terminal; ";
  if (t.hops != t.path.size() - 1) bad << "hop count disagrees with the path; ";
  for (size_t i = 0; i + 1 < t.path.size(); ++i) {
    if (!(ring_distance(t.path[i + 1], t.target, m) < ring_distance(t.path[i], t.target, m))) {
      bad << "hop " << i << " does not strictly approach the target; ";
      break;
    }
  }
  const uint64_t got = ring_distance(t.terminal, t.target, m);
  const uint64_t want = brute_min_distance(live_vector(o), t.target, m);
  if (got != want) bad << "terminal distance " << got << " is not the minimum " << want << "; ";
  if (!t.resolved) bad << "trace not marked resolved; ";
  return bad.str();
}

size_t phase_bin_count(uint64_t m) {
  size_t bins = 0;
  for (uint64_t d = m / 2; d > 0; d >>= 1) ++bins;
  return bins;
}

std::vector<double> pushforward_phase_bins(const std::vector<Key>& live, Key from, uint64_t m,
                                           size_t bins) {
  const dhtsim::HarmonicSampler sampler(m);
  std::vector<double> mass(bins, 0.0);
  double kept = 0.0;
  for (uint64_t t = 0; t < m; ++t) {
    if (t == from) continue;
    const double p = sampler.pmf_position(ring_distance(from, t, m));
    const Key resolved = brute_closest(live, t, m);
    if (resolved == from) continue;  // the procedure redraws these
    const uint64_t d = ring_distance(from, resolved, m);
    size_t bin = 0;
    while ((uint64_t(2) << bin) <= d) ++bin;  // d in [2^bin, 2^{bin+1})
    mass[bin] += p;
    kept += p;
  }
  for (double& v : mass) v /= kept;
  return mass;
}

std::string compare_binned(const std::vector<double>& observed_counts,
                           const std::vector<double>& expected_counts,
                           const std::vector<double>& variances) {
  std::ostringstream bad;
  for (size_t b = 0; b < observed_counts.size(); ++b) {
    const double dev = std::abs(observed_counts[b] - expected_counts[b]);
    const double allowed = 4.0 * std::sqrt(variances[b]) + 1e-9;
    if (dev > allowed)
      bad << "bin " << b << ": |" << observed_counts[b] << " - " << expected_counts[b] << "| > "
          << allowed << "; ";
  }
  return bad.str();
}

}  // namespace testsupport
