#include "overlay.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "routing.hpp"

namespace dhtsim {

namespace {
constexpr uint64_t kMaxRingSize = uint64_t(1) << 26;  // keymap memory bound
constexpr int kAcquireCap = 1 << 20;

static const std::set<Key> kNoReferrers;
}  // namespace

Overlay::Overlay(uint64_t m, uint32_t shortcut_count)
    : m_(m), shortcut_count_(shortcut_count) {
  if (m < 2) fail(Status::invalid_argument, "ring size must be >= 2");
  if (m > kMaxRingSize) fail(Status::capacity, "ring size above supported maximum 2^26");
  key_to_slot_.assign(m, -1);
  sampler_ = std::make_shared<const HarmonicSampler>(m);
}

const NodeState& Overlay::node(Key k) const {
  if (!contains(k)) fail(Status::unknown_key, "key " + std::to_string(k) + " is not live");
  return nodes_[key_to_slot_[k]];
}

NodeState& Overlay::node_mut(Key k) {
  if (!contains(k)) fail(Status::unknown_key, "key " + std::to_string(k) + " is not live");
  return nodes_[key_to_slot_[k]];
}

const std::set<Key>& Overlay::referrers(Key k) const {
  auto it = referrers_.find(k);
  return it == referrers_.end() ? kNoReferrers : it->second;
}

Key Overlay::closest_key(Key t) const {
  if (nodes_.empty()) fail(Status::underflow, "overlay is empty");
  auto it = live_.lower_bound(t);
  const Key succ = it == live_.end() ? *live_.begin() : *it;
  if (succ == t) return t;
  const Key pred = it == live_.begin() ? *live_.rbegin() : *std::prev(it);
  const Distance ds = ring_distance(t, succ, m_);
  const Distance dp = ring_distance(t, pred, m_);
  if (ds < dp) return succ;
  if (dp < ds) return pred;
  // tie: clockwise, i.e. the key at t + d
  return (t + ds) % m_ == succ ? succ : pred;
}

Key Overlay::random_key_except(Rng& rng, Key avoid) const {
  if (size() < 2) fail(Status::underflow, "need at least 2 nodes");
  Key k;
  do {
    k = random_key(rng);
  } while (k == avoid);
  return k;
}

void Overlay::insert_spliced(Key k) {
  if (live_.empty()) {
    // transient seed state; the second insert makes the links mutual
    NodeState ns;
    ns.key = k;
    ns.left = k;
    ns.right = k;
    key_to_slot_[k] = 0;
    nodes_.push_back(std::move(ns));
    live_.insert(k);
    return;
  }
  auto it = live_.lower_bound(k);
  const Key succ = it == live_.end() ? *live_.begin() : *it;
  const Key pred = it == live_.begin() ? *live_.rbegin() : *std::prev(it);

  NodeState ns;
  ns.key = k;
  ns.left = pred;
  ns.right = succ;
  key_to_slot_[k] = static_cast<int32_t>(nodes_.size());
  nodes_.push_back(std::move(ns));
  live_.insert(k);
  node_mut(pred).right = k;
  node_mut(succ).left = k;
}

void Overlay::erase_node(Key k) {
  const int32_t idx = key_to_slot_[k];
  const int32_t last = static_cast<int32_t>(nodes_.size()) - 1;
  if (idx != last) {
    nodes_[idx] = std::move(nodes_[last]);
    key_to_slot_[nodes_[idx].key] = idx;
  }
  nodes_.pop_back();
  key_to_slot_[k] = -1;
  live_.erase(k);
}

void Overlay::drop_referrer_if_unused(Key target, Key who) {
  const NodeState& ns = node(who);
  if (std::count(ns.shortcuts.begin(), ns.shortcuts.end(), target) > 0) return;
  auto it = referrers_.find(target);
  if (it == referrers_.end()) return;
  it->second.erase(who);
  if (it->second.empty()) referrers_.erase(it);
}

void Overlay::rewire_slot(Key who, size_t slot, Key target) {
  NodeState& ns = node_mut(who);
  const Key old = ns.shortcuts.at(slot);
  if (old == target) return;
  ns.shortcuts[slot] = target;
  drop_referrer_if_unused(old, who);
  add_referrer(target, who);
}

void Overlay::set_shortcuts(Key k, const std::vector<Key>& targets) {
  NodeState& ns = node_mut(k);
  for (Key t : targets) {
    if (!contains(t)) fail(Status::unknown_key, "shortcut target not live");
    if (t == k) fail(Status::invalid_argument, "shortcut may not point at the node itself");
  }
  const std::vector<Key> old = ns.shortcuts;
  ns.shortcuts = targets;
  for (Key t : old) drop_referrer_if_unused(t, k);
  for (Key t : targets) add_referrer(t, k);
}

Key Overlay::acquire_shortcut(Key k, Rng& rng) {
  for (int i = 0; i < kAcquireCap; ++i) {
    const Key target = sampler_->sample_target(k, rng);
    const Key got = greedy_search(*this, k, target).terminal;
    if (got != k) return got;
  }
  // Unreachable for any two-node-or-larger overlay; fall back to a uniform peer.
  return random_key_except(rng, k);
}

std::vector<Key> Overlay::draw_distinct_keys(uint64_t n, uint64_t m, Rng& rng) {
  std::vector<Key> keys;
  keys.reserve(n);
  if (n > m / 2) {
    // dense: partial Fisher-Yates over the full key space
    std::vector<Key> all(m);
    std::iota(all.begin(), all.end(), 0);
    for (uint64_t i = 0; i < n; ++i) {
      const uint64_t j = i + rng.below(m - i);
      std::swap(all[i], all[j]);
      keys.push_back(all[i]);
    }
  } else {
    std::set<Key> seen;
    while (keys.size() < n) {
      const Key k = rng.below(m);
      if (seen.insert(k).second) keys.push_back(k);
    }
  }
  return keys;
}

Overlay Overlay::bootstrap(uint64_t n, const RingParams& p, Rng& rng, uint32_t shortcut_count) {
  if (n > p.m) fail(Status::capacity, "cannot place " + std::to_string(n) + " nodes on a ring of " +
                                          std::to_string(p.m));
  if (n < 2) fail(Status::invalid_argument, "need at least 2 nodes");
  Overlay o(p.m, shortcut_count);
  const std::vector<Key> keys = draw_distinct_keys(n, p.m, rng);

  // two-node seed: mutual locals, shortcuts forced to the only other key
  o.insert_spliced(keys[0]);
  o.insert_spliced(keys[1]);
  for (int i = 0; i < 2; ++i) {
    const Key self = keys[i], other = keys[1 - i];
    auto& sc = o.node_mut(self).shortcuts;
    sc.assign(shortcut_count, other);
    if (shortcut_count > 0) o.add_referrer(other, self);
  }

  for (uint64_t i = 2; i < n; ++i) o.join(keys[i], o.random_key(rng), rng);
  return o;
}

Overlay Overlay::build_static(uint64_t n, const RingParams& p, Rng& rng, uint32_t shortcut_count) {
  if (n > p.m) fail(Status::capacity, "cannot place " + std::to_string(n) + " nodes on a ring of " +
                                          std::to_string(p.m));
  if (n < 2) fail(Status::invalid_argument, "need at least 2 nodes");
  Overlay o(p.m, shortcut_count);
  for (Key k : draw_distinct_keys(n, p.m, rng)) o.insert_spliced(k);

  for (Key k : o.live_) {  // ascending keys: deterministic draw order
    std::vector<Key> sc;
    sc.reserve(shortcut_count);
    for (uint32_t s = 0; s < shortcut_count; ++s) {
      Key got;
      do {
        got = o.closest_key(o.sampler_->sample_target(k, rng));
      } while (got == k);
      sc.push_back(got);
      o.add_referrer(got, k);
    }
    o.node_mut(k).shortcuts = std::move(sc);
  }
  return o;
}

Overlay Overlay::bootstrap_uniform_start(uint64_t n, const RingParams& p, Rng& rng,
                                         uint32_t shortcut_count) {
  if (n > p.m) fail(Status::capacity, "cannot place " + std::to_string(n) + " nodes on a ring of " +
                                          std::to_string(p.m));
  if (n < 2) fail(Status::invalid_argument, "need at least 2 nodes");
  Overlay o(p.m, shortcut_count);
  const std::vector<Key> keys = draw_distinct_keys(n, p.m, rng);

  o.insert_spliced(keys[0]);
  o.insert_spliced(keys[1]);
  for (int i = 0; i < 2; ++i) {
    const Key self = keys[i], other = keys[1 - i];
    o.node_mut(self).shortcuts.assign(shortcut_count, other);
    if (shortcut_count > 0) o.add_referrer(other, self);
  }

  // each newcomer is spliced between its nearest keys and takes a uniform
  // random shortcut among the nodes already present
  for (uint64_t i = 2; i < n; ++i) {
    const Key k = keys[i];
    if (o.contains(k)) fail(Status::duplicate_key, "key drawn twice");
    std::vector<Key> sc;
    sc.reserve(shortcut_count);
    for (uint32_t s = 0; s < shortcut_count; ++s) sc.push_back(o.random_key(rng));
    o.insert_spliced(k);
    o.node_mut(k).shortcuts = sc;
    for (Key t : sc) o.add_referrer(t, k);
  }
  return o;
}

void Overlay::join(Key newcomer, Key bootstrap_node, Rng& rng) {
  if (newcomer >= m_) fail(Status::invalid_argument, "key outside the ring");
  if (contains(newcomer)) fail(Status::duplicate_key, "key " + std::to_string(newcomer) + " already live");
  if (!contains(bootstrap_node)) fail(Status::unknown_key, "bootstrap node not live");

  // The query for the newcomer's own key always ends at the live key closest
  // to it, i.e. one of the two splice neighbors.
  greedy_search(*this, bootstrap_node, newcomer);

  insert_spliced(newcomer);
  std::vector<Key> sc;
  sc.reserve(shortcut_count_);
  for (uint32_t s = 0; s < shortcut_count_; ++s) sc.push_back(acquire_shortcut(newcomer, rng));
  node_mut(newcomer).shortcuts = sc;
  for (Key t : sc) add_referrer(t, newcomer);
}

void Overlay::leave(Key departing, Rng& rng, DepartureRepair repair) {
  if (!contains(departing)) fail(Status::unknown_key, "key " + std::to_string(departing) + " is not live");
  if (size() < 3) fail(Status::underflow, "cannot drop below 2 nodes");

  const Key left = node(departing).left;
  const Key right = node(departing).right;

  // (referrer, slot) pairs that must be repaired, in deterministic order
  std::vector<std::pair<Key, size_t>> dangling;
  for (Key r : referrers(departing)) {
    const auto& sc = node(r).shortcuts;
    for (size_t i = 0; i < sc.size(); ++i)
      if (sc[i] == departing) dangling.emplace_back(r, i);
  }

  for (Key t : node(departing).shortcuts) {
    auto it = referrers_.find(t);
    if (it != referrers_.end()) {
      it->second.erase(departing);
      if (it->second.empty()) referrers_.erase(it);
    }
  }
  referrers_.erase(departing);
  erase_node(departing);
  node_mut(left).right = right;
  node_mut(right).left = left;

  // point dead slots at a nearby survivor first so routing never crosses a
  // dead key, then optionally redo the full sampling procedure
  for (auto [r, slot] : dangling) {
    const Key nearby = r == right ? left : right;
    node_mut(r).shortcuts[slot] = nearby;
    add_referrer(nearby, r);
  }
  if (repair == DepartureRepair::resample)
    for (auto [r, slot] : dangling) rewire_slot(r, slot, acquire_shortcut(r, rng));
}

void Overlay::refresh_shortcut(Key k, Rng& rng) {
  const size_t count = node(k).shortcuts.size();
  for (size_t slot = 0; slot < count; ++slot) rewire_slot(k, slot, acquire_shortcut(k, rng));
}

void Overlay::process_answered_query(Key answerer, Key requester, Rng& rng) {
  if (!contains(answerer) || !contains(requester)) fail(Status::unknown_key, "both keys must be live");
  if (answerer == requester) fail(Status::invalid_argument, "a node does not answer its own query");
  NodeState& ns = node_mut(answerer);
  if (ns.shortcuts.empty()) return;
  const size_t slot = ns.shortcuts.size() > 1 ? rng.below(ns.shortcuts.size()) : 0;
  const Key current = ns.shortcuts[slot];
  if (current == requester) return;  // replacement would be a no-op
  const double x = static_cast<double>(ring_distance(answerer, current, m_));
  const double y = static_cast<double>(ring_distance(answerer, requester, m_));
  if (rng.coin(x / (x + y))) rewire_slot(answerer, slot, requester);
}

std::string Overlay::check() const {
  std::ostringstream bad;
  if (size() < 2) bad << "fewer than 2 live nodes; ";
  if (live_.size() != nodes_.size()) bad << "live index and node table disagree on count; ";
  for (const NodeState& ns : nodes_) {
    if (!live_.count(ns.key)) bad << "node " << ns.key << " missing from live index; ";
    if (key_to_slot_[ns.key] < 0 || nodes_[key_to_slot_[ns.key]].key != ns.key)
      bad << "slot map broken for " << ns.key << "; ";
  }

  // locals must form exactly the sorted ring
  for (auto it = live_.begin(); it != live_.end(); ++it) {
    auto nx = std::next(it);
    const Key a = *it;
    const Key b = nx == live_.end() ? *live_.begin() : *nx;
    if (node(a).right != b) bad << "right link of " << a << " is " << node(a).right << ", expected " << b << "; ";
    if (node(b).left != a) bad << "left link of " << b << " is " << node(b).left << ", expected " << a << "; ";
  }

  std::map<Key, std::set<Key>> expect;
  for (const NodeState& ns : nodes_) {
    if (ns.shortcuts.size() != shortcut_count_)
      bad << "node " << ns.key << " has " << ns.shortcuts.size() << " shortcuts, expected "
          << shortcut_count_ << "; ";
    for (Key t : ns.shortcuts) {
      if (t == ns.key) bad << "node " << ns.key << " shortcut points at itself; ";
      if (!contains(t))
        bad << "node " << ns.key << " shortcut " << t << " is dead; ";
      else
        expect[t].insert(ns.key);
    }
  }
  if (expect != referrers_) bad << "referrer index is not the inverse of the shortcut map; ";
  return bad.str();
}

void Overlay::save(std::ostream& os) const {
  os << "M=" << m_ << " N=" << size() << " seed=" << seed_ << "\n";
  for (Key k : live_) {
    const NodeState& ns = node(k);
    os << ns.key << ',' << ns.left << ',' << ns.right;
    for (Key t : ns.shortcuts) os << ',' << t;
    os << '\n';
  }
}

std::string Overlay::to_snapshot() const {
  std::ostringstream os;
  save(os);
  return os.str();
}

uint64_t Overlay::fingerprint() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : to_snapshot()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Overlay Overlay::load(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) fail(Status::io_error, "empty snapshot");
  unsigned long long m = 0, n = 0, seed = 0;
  if (std::sscanf(header.c_str(), "M=%llu N=%llu seed=%llu", &m, &n, &seed) != 3)
    fail(Status::io_error, "malformed snapshot header: " + header);

  struct Row {
    Key key, left, right;
    std::vector<Key> shortcuts;
  };
  std::vector<Row> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Row r;
    std::vector<Key> vals;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) vals.push_back(std::stoull(tok));
    if (vals.size() < 3) fail(Status::io_error, "malformed snapshot line: " + line);
    r.key = vals[0];
    r.left = vals[1];
    r.right = vals[2];
    r.shortcuts.assign(vals.begin() + 3, vals.end());
    rows.push_back(std::move(r));
  }
  if (rows.size() != n) fail(Status::io_error, "snapshot node count does not match header");
  if (rows.empty()) fail(Status::io_error, "snapshot has no nodes");

  Overlay o(m, static_cast<uint32_t>(rows[0].shortcuts.size()));
  o.seed_ = seed;
  for (const Row& r : rows) {
    if (r.key >= m || o.contains(r.key)) fail(Status::io_error, "bad key in snapshot");
    NodeState ns;
    ns.key = r.key;
    ns.left = r.left;
    ns.right = r.right;
    ns.shortcuts = r.shortcuts;
    o.key_to_slot_[r.key] = static_cast<int32_t>(o.nodes_.size());
    o.nodes_.push_back(std::move(ns));
    o.live_.insert(r.key);
  }
  for (const Row& r : rows)
    for (Key t : r.shortcuts) o.referrers_[t].insert(r.key);
  const std::string problems = o.check();
  if (!problems.empty()) fail(Status::io_error, "snapshot violates overlay invariants: " + problems);
  return o;
}

Overlay Overlay::load_snapshot(const std::string& text) {
  std::istringstream is(text);
  return load(is);
}

}  // namespace dhtsim
