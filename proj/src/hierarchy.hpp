#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "overlay.hpp"
#include "routing.hpp"

namespace dhtsim {

// Nested contiguous partition of node ranks [0, n). Level 1 cuts the ring
// into ceil(log2 n) near-equal groups; every level after that splits each
// group into ceil(log2 of the level's largest group) parts, until every group
// has at most ceil(log2 n) members. All splits at one level happen together,
// so each node carries exactly `depth` labels.
class HierarchyLabels {
 public:
  static HierarchyLabels build(uint64_t n);  // n >= 4

  uint64_t size() const { return n_; }
  uint32_t depth() const { return depth_; }
  uint64_t threshold() const { return threshold_; }

  // Local label per level (index of the node's group among its siblings).
  std::span<const uint32_t> labels(uint64_t rank) const {
    return {&labels_flat_[rank * depth_], depth_};
  }
  // Sibling count per level: the size of the label ring the node lives on.
  std::span<const uint32_t> sibling_counts(uint64_t rank) const {
    return {&siblings_flat_[rank * depth_], depth_};
  }

  uint32_t level_group_count(uint32_t level) const;   // level in [1, depth]
  uint64_t level_min_group_size(uint32_t level) const;
  uint64_t level_max_group_size(uint32_t level) const;

  // Rank interval [lo, hi) of the sibling with the given label in the same
  // parent group as `rank`, at the given level.
  std::pair<uint64_t, uint64_t> sibling_range(uint32_t level, uint64_t rank, uint32_t label) const;

 private:
  struct Group {
    uint64_t lo, hi;
    uint32_t parent;       // index into the previous level's groups
    uint32_t local_label;  // position among siblings
  };
  struct Level {
    std::vector<Group> groups;
    std::vector<uint32_t> group_of_rank;
    std::vector<uint32_t> first_child;  // per parent group of the previous level
  };

  uint64_t n_ = 0;
  uint64_t threshold_ = 0;
  uint32_t depth_ = 0;
  std::vector<Level> levels_;
  std::vector<uint32_t> labels_flat_;
  std::vector<uint32_t> siblings_flat_;
};

// Label metadata attached to a frozen overlay so searches can address nodes
// hierarchically.
struct OverlayHierarchy {
  std::shared_ptr<const HierarchyLabels> labels;
  std::vector<Key> rank_to_key;
  std::unordered_map<Key, uint64_t> key_to_rank;
};

HierarchyLabels build_labels(uint64_t n);

// Copy of `o` where every node's shortcut list is one link per level: a
// sibling label j drawn with probability proportional to 1/|i-j| (circular
// over the label ring), then a uniform node inside that sibling group. Local
// ring links are kept; cache size per node is depth + 2.
Overlay build_nested_overlay(const Overlay& o, const HierarchyLabels& h, Rng& rng);

// Greedy on the coarsest mismatched label, refining level by level, local
// links for the final descent. The (mismatch level, label distance, ring
// distance) vector decreases lexicographically on every hop.
QueryTrace hierarchical_greedy_search(const Overlay& o, Key source, Key target);

}  // namespace dhtsim
