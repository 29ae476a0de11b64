// Shared test oracles, deliberately independent of the library's own search
// and index structures: everything here is brute force over the live key set.
#pragma once

#include <cstdint>
#include <vector>

#include "overlay.hpp"
#include "routing.hpp"

namespace testsupport {

using dhtsim::Key;
using dhtsim::Overlay;
using dhtsim::QueryTrace;

// Scan of every live key; ties resolved clockwise like the oracle under test.
Key brute_closest(const std::vector<Key>& live, Key target, uint64_t m);
uint64_t brute_min_distance(const std::vector<Key>& live, Key target, uint64_t m);

std::vector<Key> live_vector(const Overlay& o);

// Asserts path shape, strict monotone ring-distance progress, and terminal
// optimality. Returns an empty string when the trace is sound.
std::string validate_trace(const Overlay& o, const QueryTrace& t);

// Distribution of dist(from, live key resolving a harmonic draw around
// `from`), conditioned on not resolving to `from`, aggregated into dyadic
// phase bins. Computed by full enumeration of the m-1 possible draws.
std::vector<double> pushforward_phase_bins(const std::vector<Key>& live, Key from, uint64_t m,
                                           size_t bins);

size_t phase_bin_count(uint64_t m);

// |observed - expected| <= 4 * sqrt(variance) in every bin, where expected and
// variance come from summing independent per-draw Bernoulli bins.
std::string compare_binned(const std::vector<double>& observed_counts,
                           const std::vector<double>& expected_counts,
                           const std::vector<double>& variances);

}  // namespace testsupport
