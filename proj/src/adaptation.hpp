#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ring.hpp"

namespace dhtsim {

// Probability that a node keeps adapting toward the requester: a node at k
// holding shortcut `current` replaces it by `requester` with probability
// x/(x+y), x = dist(k, current), y = dist(k, requester).
double replacement_probability(Key k, Key current, Key requester, const RingParams& p);

// Markov chain of the cache-update rule over shortcut distances 1..n with a
// uniformly drawn requester distance per step:
//   P[x][y] = (1/n) * x/(x+y)   for y != x,    P[x][x] = 1 - sum_{y != x}.
struct TransitionMatrix {
  uint32_t n = 0;
  std::vector<double> p;  // row-major, states 1-indexed in the maths
  double at(uint32_t x, uint32_t y) const { return p[(x - 1) * n + (y - 1)]; }
};

TransitionMatrix transition_matrix(uint32_t n);  // n >= 2

// The harmonic vector (1/x)/H_n the chain provably converges to.
std::vector<double> analytic_harmonic(uint32_t n);

struct StationaryResult {
  std::vector<double> p;
  uint64_t iterations = 0;
  double residual_l1 = 0.0;  // ||p - pP||_1 at exit, < 10*tol
};

// Power iteration from the uniform vector until successive iterates differ by
// less than tol in total variation; throws no_convergence past 1e7 sweeps.
StationaryResult stationary_distribution(const TransitionMatrix& t, double tol);

double total_variation(std::span<const double> a, std::span<const double> b);

// Largest absolute defect of the flow-balance identity
//   p_x * sum_i (1/n) x/(x+i)  =  (1/n) * sum_j p_j j/(x+j)
// over all states x, for a candidate stationary vector p.
double balance_residual(std::span<const double> p);

}  // namespace dhtsim
