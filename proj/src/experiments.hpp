#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "overlay.hpp"
#include "table.hpp"

namespace dhtsim {

enum class ExperimentKind { settle, scaling, worst_case, stationary, baseline, hierarchy, reach };

const char* experiment_name(ExperimentKind k);
std::optional<ExperimentKind> experiment_from_name(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::settle;
  uint64_t n = 1000;
  uint64_t m = 10000;
  uint64_t seed = 1;
  uint32_t probes_per_step = 100;
  uint32_t steps = 5000;
  uint32_t trials = 10000;
  uint32_t shortcut_count = 1;
  bool comparison = false;  // also run the uniform-shortcut control

  // baseline
  uint32_t c_local = 1;
  uint32_t c_short = 1;
  uint32_t m_exp = 1;
  double budget_factor = 2.0;
  bool far_pairs = false;

  // stationary
  double tol = 1e-12;

  // reach
  std::vector<int64_t> offsets;
  uint64_t modulus = 65536;
  uint32_t reach_steps = 16;
  bool signed_steps = true;
};

// Empty string when the config is runnable; otherwise the reason it is not.
std::string validate(const ExperimentConfig& cfg);

struct MetricsRecord {
  uint32_t step = 0;
  uint64_t adaptive_queries = 0;
  double mean_hops = 0.0;
  double p99_hops = 0.0;
  uint32_t max_hops = 0;
  double resolved_fraction = 0.0;
  double control_mean_hops = -1.0;  // < 0 when no control ran
};

// One §-style settling run: per step one adaptive query feeds the cache
// update, then `probes_per_step` measurement-only searches are timed. The
// optional control holds the same bootstrap overlay with its uniform
// shortcuts frozen.
std::vector<MetricsRecord> run_settling(const ExperimentConfig& cfg);

Table settle_table(const ExperimentConfig& cfg, const std::vector<MetricsRecord>& records);
Table run_experiment(const ExperimentConfig& cfg);  // validates, dispatches, tables

// Mann-Kendall trend Z statistic (tie-corrected, continuity-adjusted).
double mann_kendall_z(std::span<const double> series);

// First step index (1-based, multiples of `stride` once `window` points
// exist) whose trailing window shows no significant trend; -1 if none.
int64_t settled_step(std::span<const double> mean_hops, size_t window = 1000, size_t stride = 50,
                     double zcrit = 1.96);

double percentile(std::vector<double> values, double q);  // nearest-rank

}  // namespace dhtsim
