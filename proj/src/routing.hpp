#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "overlay.hpp"

namespace dhtsim {

struct QueryTrace {
  Key source = 0;
  Key target = 0;
  Key terminal = 0;
  uint64_t ring_size = 0;
  std::vector<Key> path;  // path.front() = source, path.back() = terminal
  uint64_t hops = 0;      // path.size() - 1
  // True when the terminal attains the minimum ring distance to the target
  // over all live keys (always the case for unbounded greedy search).
  bool resolved = false;
};

struct BoundedResult {
  QueryTrace trace;
  bool success = false;  // reached the target itself within the budget
};

// Greedy search: forward to the cached key (left, right, or shortcut)
// strictly closest to the target; stop when none is closer. Ties between
// candidates prefer shortcuts over locals, then the clockwise side of the
// target. Monotone progress guarantees termination at a minimum-distance key
// in at most N hops.
QueryTrace greedy_search(const Overlay& o, Key source, Key target);

// Same walk, aborted once `budget` hops are spent.
BoundedResult bounded_greedy_search(const Overlay& o, Key source, Key target, uint64_t budget);

// Dyadic phase index floor(log2 r) of a strictly positive distance.
uint32_t phase_of(Distance r);

// Hops spent per phase, in ascending phase order; counts sum to trace.hops.
std::vector<std::pair<uint32_t, uint64_t>> phase_hop_profile(const QueryTrace& t);

// Debug dump, one line per hop: hop_index,current_key,distance_to_target,phase
void dump_trace(const QueryTrace& t, std::ostream& os);

}  // namespace dhtsim
