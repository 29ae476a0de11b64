#include "routing.hpp"

#include <bit>
#include <map>
#include <ostream>

namespace dhtsim {

namespace {

QueryTrace run_greedy(const Overlay& o, Key source, Key target, uint64_t budget) {
  if (!o.contains(source)) fail(Status::unknown_key, "source " + std::to_string(source) + " is not live");
  const uint64_t m = o.ring_size();
  if (target >= m) fail(Status::invalid_argument, "target outside the ring");

  QueryTrace t;
  t.source = source;
  t.target = target;
  t.ring_size = m;
  t.path.push_back(source);

  Key cur = source;
  Distance dcur = ring_distance(cur, target, m);
  while (dcur != 0 && t.path.size() - 1 < budget) {
    Key best = cur;
    Distance dbest = dcur;
    bool best_shortcut = false;
    auto consider = [&](Key c, bool is_shortcut) {
      const Distance dc = ring_distance(c, target, m);
      if (dc > dbest) return;
      if (dc < dbest) {
        best = c;
        dbest = dc;
        best_shortcut = is_shortcut;
        return;
      }
      // dc == dbest: never accept a mere tie with the current position
      if (best == cur || c == best) return;
      if (is_shortcut != best_shortcut) {
        if (is_shortcut) {
          best = c;
          best_shortcut = true;
        }
        return;
      }
      // same kind, same distance: the two candidates flank the target; take
      // the clockwise (successor-side) one
      if ((c + m - target) % m == dc) best = c;
    };

    const NodeState& ns = o.node(cur);
    if (o.locals_routable()) {
      consider(ns.left, false);
      consider(ns.right, false);
    }
    for (Key s : ns.shortcuts) consider(s, true);

    if (best == cur) break;  // no strictly closer cached key
    cur = best;
    dcur = dbest;
    t.path.push_back(cur);
  }

  t.terminal = cur;
  t.hops = t.path.size() - 1;
  t.resolved = dcur == ring_distance(o.closest_key(target), target, m);
  return t;
}

}  // namespace

QueryTrace greedy_search(const Overlay& o, Key source, Key target) {
  return run_greedy(o, source, target, UINT64_MAX);
}

BoundedResult bounded_greedy_search(const Overlay& o, Key source, Key target, uint64_t budget) {
  BoundedResult r;
  r.trace = run_greedy(o, source, target, budget);
  r.success = ring_distance(r.trace.terminal, target, o.ring_size()) == 0;
  return r;
}

uint32_t phase_of(Distance r) {
  if (r == 0) fail(Status::invalid_argument, "distance 0 has no phase: the search is already done");
  return static_cast<uint32_t>(std::bit_width(r) - 1);
}

std::vector<std::pair<uint32_t, uint64_t>> phase_hop_profile(const QueryTrace& t) {
  std::map<uint32_t, uint64_t> counts;
  for (uint64_t i = 0; i < t.hops; ++i)
    counts[phase_of(ring_distance(t.path[i], t.target, t.ring_size))]++;
  return {counts.begin(), counts.end()};
}

void dump_trace(const QueryTrace& t, std::ostream& os) {
  for (uint64_t i = 0; i < t.hops; ++i) {
    const Distance d = ring_distance(t.path[i], t.target, t.ring_size);
    os << i << ',' << t.path[i] << ',' << d << ',' << phase_of(d) << '\n';
  }
}

}  // namespace dhtsim
