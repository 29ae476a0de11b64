#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "ring.hpp"

using namespace dhtsim;

TEST_CASE("ring distance basics") {
  CHECK(ring_distance(3, 9998, 10000) == 5);  // wrap-around
  CHECK(ring_distance(7, 7, 10000) == 0);
  CHECK(ring_distance(7, 7, 97) == 0);
  CHECK(ring_distance(0, 5000, 10000) == 5000);  // antipode
}

TEST_CASE("ring distance is symmetric and bounded, exhaustively for small rings") {
  for (uint64_t m : {2, 3, 16, 97, 512}) {
    for (Key a = 0; a < m; ++a)
      for (Key b = 0; b < m; ++b) {
        const Distance d = ring_distance(a, b, m);
        REQUIRE(d == ring_distance(b, a, m));
        REQUIRE(d <= m / 2);
      }
  }
}

TEST_CASE("ring distance satisfies the triangle inequality") {
  const uint64_t m = 97;
  for (Key a = 0; a < m; a += 3)
    for (Key b = 0; b < m; b += 5)
      for (Key c = 0; c < m; c += 7)
        REQUIRE(ring_distance(a, c, m) <= ring_distance(a, b, m) + ring_distance(b, c, m));
}

TEST_CASE("harmonic normalizer matches direct enumeration") {
  // enumeration oracle: walk the m-1 other keys and add 1/dist
  auto enumerate = [](uint64_t m) {
    double z = 0.0;
    for (Key k = 1; k < m; ++k) z += 1.0 / static_cast<double>(ring_distance(0, k, m));
    return z;
  };
  CHECK(harmonic_normalizer({2, 2}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(harmonic_normalizer({4, 2}) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(harmonic_normalizer({6, 2}) == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
  for (uint64_t m : {2, 3, 4, 5, 6, 7, 64, 101, 1000})
    CHECK(harmonic_normalizer({m, 2}) == doctest::Approx(enumerate(m)).epsilon(1e-12));
  CHECK_THROWS_AS(harmonic_normalizer({1, 1}), Error);
}

TEST_CASE("sampler mass function sums to one") {
  for (uint64_t m : {2, 3, 4, 5, 64, 101, 10000}) {
    const HarmonicSampler s(m);
    double total = 0.0;
    for (Key k = 1; k < m; ++k) total += s.pmf_position(ring_distance(0, k, m));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("specific sampler probabilities") {
  const HarmonicSampler s(4);
  // distance 2 is the antipode of a 4-ring: one key, weight (1/2)/2.5
  CHECK(s.pmf_distance(2) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(s.pmf_distance(1) == doctest::Approx(0.8).epsilon(1e-12));

  Rng rng(7, Stream::build);
  std::map<Key, int> counts;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) counts[s.sample_target(0, rng)]++;
  CHECK(counts[0] == 0);  // self excluded
  CHECK(static_cast<double>(counts[2]) / draws == doctest::Approx(0.2).epsilon(0.05));
  CHECK(static_cast<double>(counts[1]) / draws == doctest::Approx(0.4).epsilon(0.05));
  CHECK(static_cast<double>(counts[3]) / draws == doctest::Approx(0.4).epsilon(0.05));
}

TEST_CASE("sampled distances match the analytic law within 4 standard errors") {
  const uint64_t m = 100;
  const HarmonicSampler s(m);
  Rng rng(11, Stream::build);
  const int draws = 100000;
  std::vector<int> counts(m / 2 + 1, 0);
  for (int i = 0; i < draws; ++i) counts[ring_distance(0, s.sample_target(0, rng), m)]++;
  for (Distance d = 1; d <= m / 2; ++d) {
    const double p = s.pmf_distance(d);
    const double se = std::sqrt(p * (1.0 - p) / draws);
    CHECK(std::abs(static_cast<double>(counts[d]) / draws - p) <= 4.0 * se);
  }
  CHECK(counts[0] == 0);
}

TEST_CASE("sampler is distance-stationary across source keys") {
  // two-sample comparison of the distance histograms drawn at two different
  // keys of the same ring
  const uint64_t m = 64;
  const HarmonicSampler s(m);
  Rng r1(3, Stream::build), r2(3, Stream::adaptive);
  const int draws = 50000;
  std::vector<int> h1(m / 2 + 1, 0), h2(m / 2 + 1, 0);
  for (int i = 0; i < draws; ++i) {
    h1[ring_distance(5, s.sample_target(5, r1), m)]++;
    h2[ring_distance(41, s.sample_target(41, r2), m)]++;
  }
  for (Distance d = 1; d <= m / 2; ++d) {
    const double p1 = static_cast<double>(h1[d]) / draws;
    const double p2 = static_cast<double>(h2[d]) / draws;
    const double pool = 0.5 * (p1 + p2);
    const double se = std::sqrt(std::max(pool * (1 - pool) * 2.0 / draws, 1e-12));
    CHECK(std::abs(p1 - p2) <= 4.0 * se);
  }
}

TEST_CASE("one-shot sampler never returns the source") {
  for (uint64_t m : {2, 3, 10}) {
    Rng rng(5, Stream::build);
    for (int i = 0; i < 200; ++i) {
      const Key k = i % m;
      CHECK(sample_shortcut_target(k, {m, 2}, rng) != k);
    }
  }
}

TEST_CASE("rng substreams are independent and reproducible") {
  Rng a(42, Stream::probes), b(42, Stream::probes), c(42, Stream::adaptive);
  bool diverged = false;
  for (int i = 0; i < 16; ++i) {
    const uint64_t va = a.next();
    CHECK(va == b.next());
    if (va != c.next()) diverged = true;
  }
  CHECK(diverged);
}

TEST_CASE("bounded rng draws are in range") {
  Rng rng(1, Stream::build);
  for (uint64_t bound : {1ull, 2ull, 3ull, 10ull, 1000ull}) {
    for (int i = 0; i < 1000; ++i) REQUIRE(rng.below(bound) < bound);
  }
}
