#include "baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace dhtsim {

double uniform_ring_epsilon(const UniformRingConfig& cfg) {
  const double n = static_cast<double>(cfg.n);
  const double logm = std::pow(std::log(n), cfg.m_exp);
  return (cfg.c_local + cfg.c_short) / (2.0 * std::sqrt(n / logm));
}

Overlay build_uniform_ring(const UniformRingConfig& cfg, Rng& rng) {
  if (cfg.c_local == 0 && cfg.c_short == 0)
    fail(Status::invalid_argument, "a node needs at least one link");
  if (cfg.n < 2 * static_cast<uint64_t>(cfg.c_local) + 1)
    fail(Status::invalid_argument, "ring too small for the requested local links");
  const uint64_t degree = 2 * static_cast<uint64_t>(cfg.c_local) + cfg.c_short;
  if (degree > cfg.n - 1)
    fail(Status::capacity, "degree " + std::to_string(degree) + " exceeds n-1");

  const uint32_t extra_locals = cfg.c_local > 0 ? 2 * (cfg.c_local - 1) : 0;
  const uint32_t slots = extra_locals + cfg.c_short;

  // full occupancy: snapshot construction is the cheapest route to a valid
  // overlay with every key live
  std::string snap = "M=" + std::to_string(cfg.n) + " N=" + std::to_string(cfg.n) + " seed=0\n";
  std::vector<std::vector<Key>> shortcuts(cfg.n);
  for (Key k = 0; k < cfg.n; ++k) {
    auto& sc = shortcuts[k];
    sc.reserve(slots);
    for (uint32_t c = 2; c <= cfg.c_local; ++c) {
      sc.push_back((k + c) % cfg.n);
      sc.push_back((k + cfg.n - c) % cfg.n);
    }
    for (uint32_t c = 0; c < cfg.c_short; ++c) {
      Key t;
      do {
        t = rng.below(cfg.n);
      } while (t == k);
      sc.push_back(t);
    }
  }
  for (Key k = 0; k < cfg.n; ++k) {
    snap += std::to_string(k) + ',' + std::to_string((k + cfg.n - 1) % cfg.n) + ',' +
            std::to_string((k + 1) % cfg.n);
    for (Key t : shortcuts[k]) snap += ',' + std::to_string(t);
    snap += '\n';
  }
  Overlay o = Overlay::load_snapshot(snap);
  if (cfg.c_local == 0) o.set_locals_routable(false);
  return o;
}

FreenetBounds freenet_bound(const UniformRingConfig& cfg) {
  const double eps = uniform_ring_epsilon(cfg);
  return {std::exp(-2.0 * eps * eps), eps * eps};
}

uint64_t reach_set_size(const OffsetScheme& s, uint64_t steps) {
  if (s.modulus < 2) fail(Status::invalid_argument, "modulus must be >= 2");
  if (s.modulus > (uint64_t(1) << 26)) fail(Status::capacity, "modulus above supported maximum 2^26");
  if (s.offsets.empty()) fail(Status::invalid_argument, "offset scheme needs at least one offset");

  std::vector<uint64_t> normalized;
  std::set<uint64_t> distinct;
  for (int64_t c : s.offsets) {
    const int64_t mm = static_cast<int64_t>(s.modulus);
    const uint64_t norm = static_cast<uint64_t>(((c % mm) + mm) % mm);
    if (norm == 0) fail(Status::invalid_argument, "offsets must be nonzero mod modulus");
    if (!distinct.insert(norm).second) fail(Status::invalid_argument, "offsets must be distinct mod modulus");
    normalized.push_back(norm);
  }

  std::vector<uint8_t> seen(s.modulus, 0);
  std::vector<uint64_t> frontier{0};
  seen[0] = 1;
  uint64_t count = 1;
  for (uint64_t step = 0; step < steps && !frontier.empty() && count < s.modulus; ++step) {
    std::vector<uint64_t> next;
    next.reserve(frontier.size() * normalized.size());
    for (uint64_t pos : frontier) {
      for (uint64_t c : normalized) {
        const uint64_t fwd = pos + c >= s.modulus ? pos + c - s.modulus : pos + c;
        if (!seen[fwd]) {
          seen[fwd] = 1;
          ++count;
          next.push_back(fwd);
        }
        if (s.signed_steps) {
          const uint64_t bwd = pos >= c ? pos - c : pos + s.modulus - c;
          if (!seen[bwd]) {
            seen[bwd] = 1;
            ++count;
            next.push_back(bwd);
          }
        }
      }
    }
    frontier.swap(next);
  }
  return count;
}

ReachReport reach_bound_check(const OffsetScheme& s, const ReachBoundParams& p) {
  if (p.alpha <= 0.0 || p.alpha > 1.0) fail(Status::invalid_argument, "alpha must lie in (0, 1]");
  ReachReport r;
  const double log2m = std::log2(static_cast<double>(s.modulus));
  r.steps = static_cast<uint64_t>(std::ceil(std::pow(log2m, p.m_exp)));
  r.reach = reach_set_size(s, r.steps);
  r.bound = std::pow(2.0 * static_cast<double>(r.steps) + 1.0, static_cast<double>(s.offsets.size()));
  r.alpha_fraction = static_cast<double>(r.reach) / (p.alpha * static_cast<double>(s.modulus));
  r.holds = static_cast<double>(r.reach) <= r.bound;
  return r;
}

}  // namespace dhtsim
