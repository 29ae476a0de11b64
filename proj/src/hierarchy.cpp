#include "hierarchy.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <tuple>

namespace dhtsim {

namespace {
uint64_t ceil_log2(uint64_t v) { return v <= 1 ? 0 : std::bit_width(v - 1); }
}  // namespace

HierarchyLabels HierarchyLabels::build(uint64_t n) {
  if (n < 4) fail(Status::invalid_argument, "hierarchy needs at least 4 nodes");
  HierarchyLabels h;
  h.n_ = n;
  h.threshold_ = std::max<uint64_t>(2, ceil_log2(n));

  // conceptual level 0: one root group covering every rank
  std::vector<Group> prev{{0, n, 0, 0}};
  uint64_t max_size = n;
  while (max_size > h.threshold_) {
    const uint32_t split = static_cast<uint32_t>(std::max<uint64_t>(2, ceil_log2(max_size)));
    Level level;
    level.group_of_rank.resize(n);
    level.first_child.reserve(prev.size());
    for (uint32_t pi = 0; pi < prev.size(); ++pi) {
      const Group& pg = prev[pi];
      const uint64_t sz = pg.hi - pg.lo;
      const uint32_t parts = static_cast<uint32_t>(std::min<uint64_t>(split, sz));
      level.first_child.push_back(static_cast<uint32_t>(level.groups.size()));
      const uint64_t base = sz / parts, extra = sz % parts;  // remainder one-per-group from the left
      uint64_t lo = pg.lo;
      for (uint32_t c = 0; c < parts; ++c) {
        const uint64_t hi = lo + base + (c < extra ? 1 : 0);
        for (uint64_t r = lo; r < hi; ++r)
          level.group_of_rank[r] = static_cast<uint32_t>(level.groups.size());
        level.groups.push_back({lo, hi, pi, c});
        lo = hi;
      }
    }
    max_size = 0;
    for (const Group& g : level.groups) max_size = std::max(max_size, g.hi - g.lo);
    prev = level.groups;
    h.levels_.push_back(std::move(level));
  }
  h.depth_ = static_cast<uint32_t>(h.levels_.size());

  h.labels_flat_.resize(n * h.depth_);
  h.siblings_flat_.resize(n * h.depth_);
  for (uint64_t r = 0; r < n; ++r) {
    for (uint32_t l = 0; l < h.depth_; ++l) {
      const Level& lv = h.levels_[l];
      const Group& g = lv.groups[lv.group_of_rank[r]];
      // sibling count = number of children the parent produced
      const uint32_t first = lv.first_child[g.parent];
      uint32_t siblings = 0;
      while (first + siblings < lv.groups.size() && lv.groups[first + siblings].parent == g.parent)
        ++siblings;
      h.labels_flat_[r * h.depth_ + l] = g.local_label;
      h.siblings_flat_[r * h.depth_ + l] = siblings;
    }
  }
  return h;
}

uint32_t HierarchyLabels::level_group_count(uint32_t level) const {
  if (level < 1 || level > depth_) fail(Status::invalid_argument, "level out of range");
  return static_cast<uint32_t>(levels_[level - 1].groups.size());
}

uint64_t HierarchyLabels::level_min_group_size(uint32_t level) const {
  if (level < 1 || level > depth_) fail(Status::invalid_argument, "level out of range");
  uint64_t best = UINT64_MAX;
  for (const Group& g : levels_[level - 1].groups) best = std::min(best, g.hi - g.lo);
  return best;
}

uint64_t HierarchyLabels::level_max_group_size(uint32_t level) const {
  if (level < 1 || level > depth_) fail(Status::invalid_argument, "level out of range");
  uint64_t best = 0;
  for (const Group& g : levels_[level - 1].groups) best = std::max(best, g.hi - g.lo);
  return best;
}

std::pair<uint64_t, uint64_t> HierarchyLabels::sibling_range(uint32_t level, uint64_t rank,
                                                             uint32_t label) const {
  if (level < 1 || level > depth_) fail(Status::invalid_argument, "level out of range");
  const Level& lv = levels_[level - 1];
  const Group& g = lv.groups[lv.group_of_rank[rank]];
  const uint32_t idx = lv.first_child[g.parent] + label;
  if (idx >= lv.groups.size() || lv.groups[idx].parent != g.parent)
    fail(Status::invalid_argument, "label out of range for this parent");
  return {lv.groups[idx].lo, lv.groups[idx].hi};
}

HierarchyLabels build_labels(uint64_t n) { return HierarchyLabels::build(n); }

Overlay build_nested_overlay(const Overlay& o, const HierarchyLabels& h, Rng& rng) {
  if (h.size() != o.size())
    fail(Status::invalid_argument, "label count does not match the live node count");

  auto oh = std::make_shared<OverlayHierarchy>();
  oh->labels = std::make_shared<const HierarchyLabels>(h);
  oh->rank_to_key.assign(o.live_keys().begin(), o.live_keys().end());
  for (uint64_t r = 0; r < oh->rank_to_key.size(); ++r) oh->key_to_rank[oh->rank_to_key[r]] = r;

  Overlay out = o;
  const uint32_t depth = h.depth();
  std::map<uint32_t, HarmonicSampler> label_samplers;  // keyed by label-ring size

  for (uint64_t r = 0; r < h.size(); ++r) {
    const auto labels = h.labels(r);
    const auto siblings = h.sibling_counts(r);
    std::vector<Key> shortcuts;
    shortcuts.reserve(depth);
    for (uint32_t l = 0; l < depth; ++l) {
      const uint32_t ring = siblings[l];
      if (ring < 2) fail(Status::internal, "degenerate label ring");
      auto it = label_samplers.find(ring);
      if (it == label_samplers.end()) it = label_samplers.emplace(ring, HarmonicSampler(ring)).first;
      const uint32_t j = static_cast<uint32_t>(it->second.sample_target(labels[l], rng));
      const auto [lo, hi] = h.sibling_range(l + 1, r, j);
      const uint64_t pick = lo + rng.below(hi - lo);
      shortcuts.push_back(oh->rank_to_key[pick]);
    }
    out.set_shortcuts(oh->rank_to_key[r], shortcuts);
  }
  // all nodes rewired above, so the per-node count is uniformly `depth`
  out.set_hierarchy(oh);
  return out;
}

namespace {

struct LexKey {
  uint32_t mismatch;  // depth - first mismatched level; 0 = full label match
  uint64_t label_dist;
  uint64_t ring_dist;
  auto tied() const { return std::tie(mismatch, label_dist, ring_dist); }
  bool operator<(const LexKey& o) const { return tied() < o.tied(); }
  bool operator==(const LexKey& o) const { return tied() == o.tied(); }
};

}  // namespace

QueryTrace hierarchical_greedy_search(const Overlay& o, Key source, Key target) {
  auto oh = o.hierarchy();
  if (!oh) fail(Status::invalid_argument, "overlay carries no hierarchy labels");
  if (!o.contains(source)) fail(Status::unknown_key, "source is not live");
  const uint64_t m = o.ring_size();
  if (target >= m) fail(Status::invalid_argument, "target outside the ring");

  const HierarchyLabels& h = *oh->labels;
  const uint32_t depth = h.depth();
  const Key target_node = o.closest_key(target);
  const auto tlabels = h.labels(oh->key_to_rank.at(target_node));

  auto lex = [&](Key v) {
    const uint64_t r = oh->key_to_rank.at(v);
    const auto labels = h.labels(r);
    const auto siblings = h.sibling_counts(r);
    for (uint32_t l = 0; l < depth; ++l) {
      if (labels[l] != tlabels[l]) {
        const uint64_t ld = ring_distance(labels[l], tlabels[l], siblings[l]);
        return LexKey{depth - l, ld, ring_distance(v, target, m)};
      }
    }
    return LexKey{0, 0, ring_distance(v, target, m)};
  };

  QueryTrace t;
  t.source = source;
  t.target = target;
  t.ring_size = m;
  t.path.push_back(source);

  Key cur = source;
  LexKey kcur = lex(cur);
  while (!(kcur.mismatch == 0 && kcur.ring_dist == 0)) {
    Key best = cur;
    LexKey kbest = kcur;
    bool best_shortcut = false;
    auto consider = [&](Key c, bool is_shortcut) {
      const LexKey kc = lex(c);
      if (kbest < kc) return;
      if (kc < kbest) {
        best = c;
        kbest = kc;
        best_shortcut = is_shortcut;
        return;
      }
      if (best == cur || c == best) return;
      if (is_shortcut != best_shortcut) {
        if (is_shortcut) {
          best = c;
          best_shortcut = true;
        }
        return;
      }
      if ((c + m - target) % m == kc.ring_dist) best = c;
    };

    const NodeState& ns = o.node(cur);
    consider(ns.left, false);
    consider(ns.right, false);
    for (Key s : ns.shortcuts) consider(s, true);

    if (best == cur) break;
    cur = best;
    kcur = kbest;
    t.path.push_back(cur);
  }

  t.terminal = cur;
  t.hops = t.path.size() - 1;
  t.resolved =
      ring_distance(cur, target, m) == ring_distance(o.closest_key(target), target, m);
  return t;
}

}  // namespace dhtsim
