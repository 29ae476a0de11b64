#include "adaptation.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace dhtsim {

double replacement_probability(Key k, Key current, Key requester, const RingParams& p) {
  validate(p);
  const Distance x = ring_distance(k, current, p);
  const Distance y = ring_distance(k, requester, p);
  if (x == 0 || y == 0)
    fail(Status::invalid_argument, "replacement probability needs strictly positive distances");
  return static_cast<double>(x) / static_cast<double>(x + y);
}

TransitionMatrix transition_matrix(uint32_t n) {
  if (n < 2) fail(Status::invalid_argument, "the chain needs at least 2 states");
  TransitionMatrix t;
  t.n = n;
  t.p.assign(static_cast<size_t>(n) * n, 0.0);
  const double inv_n = 1.0 / n;
  for (uint32_t x = 1; x <= n; ++x) {
    double off = 0.0;
    for (uint32_t y = 1; y <= n; ++y) {
      if (y == x) continue;
      const double v = inv_n * x / static_cast<double>(x + y);
      t.p[(x - 1) * n + (y - 1)] = v;
      off += v;
    }
    t.p[(x - 1) * n + (x - 1)] = 1.0 - off;
  }
  return t;
}

std::vector<double> analytic_harmonic(uint32_t n) {
  std::vector<double> p(n);
  double h = 0.0;
  for (uint32_t x = 1; x <= n; ++x) h += 1.0 / x;
  for (uint32_t x = 1; x <= n; ++x) p[x - 1] = 1.0 / x / h;
  return p;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

StationaryResult stationary_distribution(const TransitionMatrix& t, double tol) {
  if (t.n < 2 || t.p.size() != static_cast<size_t>(t.n) * t.n)
    fail(Status::invalid_argument, "malformed transition matrix");
  if (tol <= 0) fail(Status::invalid_argument, "tolerance must be positive");

  const uint32_t n = t.n;
  constexpr uint64_t kIterationCap = 10'000'000;
  std::vector<double> p(n, 1.0 / n), next(n);
  StationaryResult res;
  for (uint64_t it = 1; it <= kIterationCap; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (uint32_t x = 0; x < n; ++x) {
      const double px = p[x];
      const double* row = &t.p[static_cast<size_t>(x) * n];
      for (uint32_t y = 0; y < n; ++y) next[y] += px * row[y];
    }
    const double tv = total_variation(p, next);
    p.swap(next);
    if (tv < tol) {
      res.p = p;
      res.iterations = it;
      // one more sweep for the exit residual ||p - pP||_1
      std::fill(next.begin(), next.end(), 0.0);
      for (uint32_t x = 0; x < n; ++x) {
        const double px = p[x];
        const double* row = &t.p[static_cast<size_t>(x) * n];
        for (uint32_t y = 0; y < n; ++y) next[y] += px * row[y];
      }
      res.residual_l1 = 2.0 * total_variation(p, next);
      return res;
    }
  }
  fail(Status::no_convergence,
       "power iteration did not converge within " + std::to_string(kIterationCap) + " sweeps");
}

double balance_residual(std::span<const double> p) {
  const uint32_t n = static_cast<uint32_t>(p.size());
  double worst = 0.0;
  for (uint32_t x = 1; x <= n; ++x) {
    double out = 0.0, in = 0.0;
    for (uint32_t i = 1; i <= n; ++i) {
      out += p[x - 1] * (1.0 / n) * x / static_cast<double>(x + i);
      in += (1.0 / n) * p[i - 1] * i / static_cast<double>(x + i);
    }
    worst = std::max(worst, std::abs(out - in));
  }
  return worst;
}

}  // namespace dhtsim
