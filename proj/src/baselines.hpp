#pragma once

#include <cstdint>
#include <vector>

#include "overlay.hpp"
#include "routing.hpp"

namespace dhtsim {

// Ring with c_local neighbors per side plus c_short uniformly random
// shortcuts: the analytic stand-in for Freenet's emergent topology.
struct UniformRingConfig {
  uint64_t n = 0;
  uint32_t c_local = 1;
  uint32_t c_short = 1;
  uint32_t m_exp = 1;  // polylog exponent m
};

// epsilon = (C + C') / (2 * sqrt(n / ln^m n)); recomputed, never stored.
double uniform_ring_epsilon(const UniformRingConfig& cfg);

// Fully occupied ring; the first 2(c_local - 1) shortcut slots are the
// deterministic extra locals (+-2 ... +-c_local), the rest uniform draws.
// With c_local = 0 the ring links exist structurally but are excluded from
// greedy candidate sets.
Overlay build_uniform_ring(const UniformRingConfig& cfg, Rng& rng);

struct FreenetBounds {
  double failure_upper;             // exp(-2 eps^2), the large-eps regime
  double success_upper_small_eps;   // eps^2, the small-eps regime
};
FreenetBounds freenet_bound(const UniformRingConfig& cfg);

// Commuting deterministic caching scheme: every node caches K + c_1 ... K + c_d.
struct OffsetScheme {
  std::vector<int64_t> offsets;
  uint64_t modulus = 0;
  bool signed_steps = true;  // whether a hop may subtract an offset
};

// Exact count (breadth-first enumeration mod modulus) of positions reachable
// from 0 in at most `steps` hops.
uint64_t reach_set_size(const OffsetScheme& s, uint64_t steps);

struct ReachBoundParams {
  uint32_t m_exp = 1;
  double alpha = 1.0;  // in (0, 1]
};

struct ReachReport {
  uint64_t steps = 0;
  uint64_t reach = 0;
  double bound = 0.0;           // (2L+1)^d
  double alpha_fraction = 0.0;  // reach / (alpha * modulus)
  bool holds = false;
};

// Checks reach_set_size(s, L) <= (2L+1)^d for L = ceil(log2(modulus)^m).
ReachReport reach_bound_check(const OffsetScheme& s, const ReachBoundParams& p);

}  // namespace dhtsim
