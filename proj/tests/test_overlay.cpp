#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "overlay.hpp"
#include "routing.hpp"
#include "support.hpp"

using namespace dhtsim;
using namespace testsupport;

TEST_CASE("two-node bootstrap: mutual neighbors and shortcuts") {
  Rng rng(1);
  Overlay o = Overlay::bootstrap(2, {10, 2}, rng);
  REQUIRE(o.size() == 2);
  const auto live = live_vector(o);
  const Key a = live[0], b = live[1];
  CHECK(o.node(a).left == b);
  CHECK(o.node(a).right == b);
  CHECK(o.node(a).shortcuts == std::vector<Key>{b});
  CHECK(o.node(b).shortcuts == std::vector<Key>{a});
  CHECK(o.check().empty());
}

TEST_CASE("full-occupancy bootstrap: locals are key +- 1") {
  Rng rng(2);
  const uint64_t m = 12;
  Overlay o = Overlay::bootstrap(m, {m, m}, rng);
  REQUIRE(o.size() == m);
  for (Key k = 0; k < m; ++k) {
    CHECK(o.node(k).left == (k + m - 1) % m);
    CHECK(o.node(k).right == (k + 1) % m);
  }
  CHECK(o.check().empty());
}

TEST_CASE("bootstrap rejects impossible sizes") {
  Rng rng(3);
  CHECK_THROWS_WITH_AS(static_cast<void>(Overlay::bootstrap(11, {10, 10}, rng)),
                       doctest::Contains("cannot place"), Error);
  CHECK_THROWS_AS(static_cast<void>(Overlay::bootstrap(1, {10, 2}, rng)), Error);
}

TEST_CASE("closest key: exact hit, nearest, and clockwise tie-break") {
  // hand-built overlay with live keys {10, 20} on a 100-ring
  Overlay o = Overlay::load_snapshot("M=100 N=2 seed=0\n10,20,20,20\n20,10,10,10\n");
  CHECK(o.closest_key(10) == 10);
  CHECK(o.closest_key(14) == 10);  // distance 4 beats 6
  CHECK(o.closest_key(15) == 20);  // tie resolved clockwise
  CHECK(o.closest_key(99) == 10);
}

TEST_CASE("closest key agrees with brute force exhaustively") {
  for (uint64_t m : {7, 64, 512}) {
    Rng rng(m);
    const uint64_t n = std::max<uint64_t>(2, m / 3);
    Overlay o = Overlay::build_static(n, {m, n}, rng);
    const auto live = live_vector(o);
    for (Key t = 0; t < m; ++t) REQUIRE(o.closest_key(t) == brute_closest(live, t, m));
  }
}

TEST_CASE("join: smallest case and duplicate rejection") {
  Rng rng(5);
  Overlay o = Overlay::bootstrap(2, {50, 2}, rng);
  const auto live = live_vector(o);
  Key newcomer = 0;
  while (o.contains(newcomer)) ++newcomer;
  o.join(newcomer, live[0], rng);
  CHECK(o.size() == 3);
  CHECK(o.check().empty());
  try {
    o.join(newcomer, live[0], rng);
    FAIL("duplicate join must throw");
  } catch (const Error& e) {
    CHECK(e.code() == Status::duplicate_key);
  }
}

TEST_CASE("join then immediate leave restores the local ring") {
  Rng rng(6);
  Overlay o = Overlay::bootstrap(40, {400, 40}, rng);
  auto triples = [](const Overlay& ov) {
    std::set<std::tuple<Key, Key, Key>> out;
    for (Key k : ov.live_keys()) out.insert({k, ov.node(k).left, ov.node(k).right});
    return out;
  };
  const auto before = triples(o);
  Key newcomer = 0;
  while (o.contains(newcomer)) ++newcomer;
  o.join(newcomer, o.random_key(rng), rng);
  o.leave(newcomer, rng);
  CHECK(triples(o) == before);
  CHECK(o.check().empty());
}

TEST_CASE("leave: three nodes down to two, and underflow below that") {
  Rng rng(7);
  Overlay o = Overlay::bootstrap(3, {30, 3}, rng);
  const Key gone = o.random_key(rng);
  o.leave(gone, rng);
  REQUIRE(o.size() == 2);
  const auto live = live_vector(o);
  CHECK(o.node(live[0]).left == live[1]);
  CHECK(o.node(live[0]).right == live[1]);
  CHECK(o.check().empty());
  try {
    o.leave(live[0], rng);
    FAIL("underflow leave must throw");
  } catch (const Error& e) {
    CHECK(e.code() == Status::underflow);
  }
  try {
    o.leave(gone, rng);
    FAIL("unknown-key leave must throw");
  } catch (const Error& e) {
    CHECK(e.code() != Status::ok);
  }
}

TEST_CASE("leave repoints every referrer at a live key") {
  Rng rng(8);
  Overlay o = Overlay::bootstrap(64, {640, 64}, rng);
  // force five referrers onto one victim
  const auto live = live_vector(o);
  const Key victim = live[10];
  std::vector<Key> referrers;
  for (size_t i = 0; i < live.size() && referrers.size() < 5; ++i)
    if (live[i] != victim) referrers.push_back(live[i]);
  for (Key r : referrers) o.set_shortcuts(r, {victim});
  REQUIRE(o.referrers(victim).size() >= 5);

  o.leave(victim, rng);
  for (Key r : referrers) {
    const Key sc = o.node(r).shortcuts.at(0);
    CHECK(o.contains(sc));
    CHECK(sc != victim);
  }
  CHECK(o.check().empty());
}

TEST_CASE("leave with nearby repair keeps a splice neighbor") {
  Rng rng(9);
  Overlay o = Overlay::bootstrap(16, {160, 16}, rng);
  const auto live = live_vector(o);
  const Key victim = live[4];
  const Key left = o.node(victim).left;
  const Key right = o.node(victim).right;
  const Key referrer = live[8];
  o.set_shortcuts(referrer, {victim});
  o.leave(victim, rng, DepartureRepair::nearby);
  const Key sc = o.node(referrer).shortcuts.at(0);
  CHECK((sc == left || sc == right));
  CHECK(o.check().empty());
}

TEST_CASE("refresh keeps the only possible shortcut in a two-node overlay") {
  Rng rng(10);
  Overlay o = Overlay::bootstrap(2, {100, 2}, rng);
  const auto live = live_vector(o);
  for (int i = 0; i < 20; ++i) {
    o.refresh_shortcut(live[0], rng);
    CHECK(o.node(live[0]).shortcuts.at(0) == live[1]);
  }
  CHECK(o.check().empty());
  const Key dead = o.contains(0) ? (o.contains(1) ? 2 : 1) : 0;
  CHECK_THROWS_AS(o.refresh_shortcut(dead, rng), Error);
}

TEST_CASE("refresh always lands on a live key other than the node") {
  Rng rng(11);
  Overlay o = Overlay::bootstrap(50, {1000, 50}, rng);
  const Key k = o.random_key(rng);
  for (int i = 0; i < 200; ++i) {
    o.refresh_shortcut(k, rng);
    const Key sc = o.node(k).shortcuts.at(0);
    REQUIRE(o.contains(sc));
    REQUIRE(sc != k);
  }
  CHECK(o.check().empty());
}

TEST_CASE("churn fuzz: invariants hold after every operation") {
  Rng rng(12);
  const uint64_t m = 4096;
  Overlay o = Overlay::bootstrap(64, {m, 64}, rng);
  int joins = 0, leaves = 0, refreshes = 0;
  for (int op = 0; op < 3000; ++op) {
    const uint64_t dice = rng.below(10);
    if ((dice < 4 && o.size() < 300) || o.size() <= 3) {
      Key k = rng.below(m);
      while (o.contains(k)) k = rng.below(m);
      o.join(k, o.random_key(rng), rng);
      ++joins;
    } else if (dice < 8) {
      o.leave(o.random_key(rng), rng);
      ++leaves;
    } else {
      o.refresh_shortcut(o.random_key(rng), rng);
      ++refreshes;
    }
    const std::string problems = o.check();
    REQUIRE_MESSAGE(problems.empty(), problems);
  }
  CHECK(joins > 0);
  CHECK(leaves > 0);
  CHECK(refreshes > 0);
}

TEST_CASE("snapshot round-trip is byte-identical and validated") {
  Rng rng(13);
  Overlay o = Overlay::bootstrap(30, {300, 30}, rng, 2);
  o.set_seed(77);
  const std::string snap = o.to_snapshot();
  CHECK(snap.rfind("M=300 N=30 seed=77\n", 0) == 0);
  Overlay back = Overlay::load_snapshot(snap);
  CHECK(back.to_snapshot() == snap);
  CHECK(back.check().empty());
  CHECK(back.shortcut_count() == 2);
  CHECK(back.fingerprint() == o.fingerprint());

  // dead shortcut target must be refused
  CHECK_THROWS_AS(static_cast<void>(Overlay::load_snapshot("M=10 N=2 seed=0\n1,5,5,5\n5,1,1,9\n")),
                  Error);
}

TEST_CASE("bootstrapped shortcut distances follow the harmonic pushforward") {
  // Incremental replica of the bootstrap join sequence. Before each join the
  // exact law of the newcomer's shortcut distance (harmonic draw resolved to
  // the closest live key, redrawn on self) is enumerated, giving per-bin
  // expectation and variance for the realized histogram.
  Rng rng(14);
  const uint64_t m = 10000, n = 1000;
  const size_t bins = phase_bin_count(m);
  std::vector<double> expected(bins, 0.0), variance(bins, 0.0), observed(bins, 0.0);

  Overlay o = Overlay::bootstrap(2, {m, 2}, rng);
  std::vector<Key> joined;
  for (uint64_t i = 2; i < n; ++i) {
    Key k = rng.below(m);
    while (o.contains(k)) k = rng.below(m);
    // the draw happens after the splice, so the newcomer belongs to the live
    // set the oracle resolves against (self-resolutions are redrawn)
    auto live = live_vector(o);
    live.push_back(k);
    const auto p = pushforward_phase_bins(live, k, m, bins);
    for (size_t b = 0; b < bins; ++b) {
      expected[b] += p[b];
      variance[b] += p[b] * (1.0 - p[b]);
    }
    o.join(k, o.random_key(rng), rng);
    joined.push_back(k);
  }
  REQUIRE(o.check().empty());
  for (Key k : joined) {
    const uint64_t d = ring_distance(k, o.node(k).shortcuts.at(0), m);
    size_t b = 0;
    while ((uint64_t(2) << b) <= d) ++b;
    observed[b] += 1.0;
  }
  const std::string verdict = compare_binned(observed, expected, variance);
  CHECK_MESSAGE(verdict.empty(), verdict);
}

TEST_CASE("refreshed shortcut distances follow the per-node pushforward law") {
  Rng rng(15);
  const uint64_t m = 4096, n = 500;
  Overlay o = Overlay::build_static(n, {m, n}, rng);
  const Key k = o.random_key(rng);
  const size_t bins = phase_bin_count(m);
  const auto p = pushforward_phase_bins(live_vector(o), k, m, bins);

  const int draws = 20000;
  std::vector<double> observed(bins, 0.0), expected(bins, 0.0), variance(bins, 0.0);
  for (int i = 0; i < draws; ++i) {
    o.refresh_shortcut(k, rng);
    const uint64_t d = ring_distance(k, o.node(k).shortcuts.at(0), m);
    size_t b = 0;
    while ((uint64_t(2) << b) <= d) ++b;
    observed[b] += 1.0;
  }
  for (size_t b = 0; b < bins; ++b) {
    expected[b] = draws * p[b];
    variance[b] = draws * p[b] * (1.0 - p[b]);
  }
  const std::string verdict = compare_binned(observed, expected, variance);
  CHECK_MESSAGE(verdict.empty(), verdict);
  CHECK(o.check().empty());
}

TEST_CASE("static build matches the harmonic pushforward too") {
  Rng rng(16);
  const uint64_t m = 10000, n = 1000;
  Overlay o = Overlay::build_static(n, {m, n}, rng);
  REQUIRE(o.check().empty());
  const auto live = live_vector(o);
  const size_t bins = phase_bin_count(m);
  std::vector<double> expected(bins, 0.0), variance(bins, 0.0), observed(bins, 0.0);
  for (Key k : live) {
    const auto p = pushforward_phase_bins(live, k, m, bins);
    for (size_t b = 0; b < bins; ++b) {
      expected[b] += p[b];
      variance[b] += p[b] * (1.0 - p[b]);
    }
    const uint64_t d = ring_distance(k, o.node(k).shortcuts.at(0), m);
    size_t b = 0;
    while ((uint64_t(2) << b) <= d) ++b;
    observed[b] += 1.0;
  }
  const std::string verdict = compare_binned(observed, expected, variance);
  CHECK_MESSAGE(verdict.empty(), verdict);
}

TEST_CASE("set_shortcuts validates its targets") {
  Rng rng(17);
  Overlay o = Overlay::bootstrap(8, {80, 8}, rng);
  const auto live = live_vector(o);
  CHECK_THROWS_AS(o.set_shortcuts(live[0], {live[0]}), Error);
  Key dead = 0;
  while (o.contains(dead)) ++dead;
  CHECK_THROWS_AS(o.set_shortcuts(live[0], {dead}), Error);
}
