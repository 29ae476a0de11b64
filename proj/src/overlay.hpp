#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ring.hpp"
#include "rng.hpp"

namespace dhtsim {

struct OverlayHierarchy;  // hierarchy.hpp

struct NodeState {
  Key key = 0;
  Key left = 0;   // nearest live predecessor
  Key right = 0;  // nearest live successor
  std::vector<Key> shortcuts;
};

// What a node does when its shortcut target departs: redo the sampling+routing
// procedure (preserves the harmonic law), or just take a nearby survivor.
enum class DepartureRepair { resample, nearby };

// The live network state: one consistent local ring over the live keys, a
// configurable number of shortcuts per node, and the reverse-reference index
// used to notify shortcut holders on departure. Single writer; concurrent
// reads of a frozen overlay are safe.
class Overlay {
 public:
  // n random distinct keys, grown from a 2-node seed by n-2 routed joins.
  static Overlay bootstrap(uint64_t n, const RingParams& p, Rng& rng, uint32_t shortcut_count = 1);

  // Oracle placement and exact harmonic shortcuts, no routed joins. Used to
  // build large static overlays for scaling runs.
  static Overlay build_static(uint64_t n, const RingParams& p, Rng& rng, uint32_t shortcut_count = 1);

  // Oracle placement with a uniform-random initial shortcut per node, i.e. a
  // deliberately non-harmonic start for the settling experiment.
  static Overlay bootstrap_uniform_start(uint64_t n, const RingParams& p, Rng& rng,
                                         uint32_t shortcut_count = 1);

  RingParams params() const { return {m_, size()}; }
  uint64_t ring_size() const { return m_; }
  uint64_t size() const { return nodes_.size(); }
  uint32_t shortcut_count() const { return shortcut_count_; }

  bool contains(Key k) const { return k < m_ && key_to_slot_[k] >= 0; }
  const NodeState& node(Key k) const;  // throws unknown_key
  const std::set<Key>& live_keys() const { return live_; }
  const std::set<Key>& referrers(Key k) const;

  // Live key minimizing ring distance to t; equidistant ties go to the
  // clockwise (successor-side) key.
  Key closest_key(Key t) const;

  Key random_key(Rng& rng) const { return nodes_[rng.below(nodes_.size())].key; }
  Key random_key_except(Rng& rng, Key avoid) const;

  // Churn. All three keep every overlay invariant.
  void join(Key newcomer, Key bootstrap_node, Rng& rng);
  void leave(Key departing, Rng& rng, DepartureRepair repair = DepartureRepair::resample);
  void refresh_shortcut(Key k, Rng& rng);

  // Result-6 cache update: with probability x/(x+y) the answerer's shortcut
  // (a uniformly chosen slot when there are several) becomes the requester.
  void process_answered_query(Key answerer, Key requester, Rng& rng);

  // Replaces k's shortcut list wholesale (targets must be live and != k).
  void set_shortcuts(Key k, const std::vector<Key>& targets);

  const HarmonicSampler& sampler() const { return *sampler_; }

  // Baseline rings built without local links exclude left/right from greedy
  // candidate sets; everything else keeps them.
  bool locals_routable() const { return locals_routable_; }
  void set_locals_routable(bool v) { locals_routable_ = v; }

  std::shared_ptr<const OverlayHierarchy> hierarchy() const { return hierarchy_; }
  void set_hierarchy(std::shared_ptr<const OverlayHierarchy> h) { hierarchy_ = std::move(h); }

  uint64_t seed() const { return seed_; }
  void set_seed(uint64_t s) { seed_ = s; }

  // Full invariant audit; returns an empty string when everything holds.
  std::string check() const;
  uint64_t fingerprint() const;  // FNV-1a over the snapshot text

  // Line-oriented snapshot: "M=<m> N=<n> seed=<seed>" then one
  // "key,left,right,shortcut..." line per node in ascending key order.
  void save(std::ostream& os) const;
  std::string to_snapshot() const;
  static Overlay load(std::istream& is);
  static Overlay load_snapshot(const std::string& text);

 private:
  Overlay(uint64_t m, uint32_t shortcut_count);

  int64_t slot_of(Key k) const { return key_to_slot_[k]; }
  NodeState& node_mut(Key k);
  void insert_spliced(Key k);  // link k between its live neighbors
  void erase_node(Key k);
  void rewire_slot(Key who, size_t slot, Key target);
  void add_referrer(Key target, Key who) { referrers_[target].insert(who); }
  void drop_referrer_if_unused(Key target, Key who);
  // Harmonic draw routed through the overlay until it resolves to a live key
  // other than k.
  Key acquire_shortcut(Key k, Rng& rng);
  static std::vector<Key> draw_distinct_keys(uint64_t n, uint64_t m, Rng& rng);

  uint64_t m_ = 0;
  uint32_t shortcut_count_ = 1;
  uint64_t seed_ = 0;
  bool locals_routable_ = true;
  std::vector<int32_t> key_to_slot_;  // -1 = not live
  std::vector<NodeState> nodes_;      // dense, swap-erased
  std::set<Key> live_;                // ordered index of live keys
  std::map<Key, std::set<Key>> referrers_;
  std::shared_ptr<const HarmonicSampler> sampler_;
  std::shared_ptr<const OverlayHierarchy> hierarchy_;
};

}  // namespace dhtsim
