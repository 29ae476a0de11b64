#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "adaptation.hpp"
#include "hierarchy.hpp"
#include "routing.hpp"

namespace dhtsim {

const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::settle: return "settle";
    case ExperimentKind::scaling: return "scaling";
    case ExperimentKind::worst_case: return "worst_case";
    case ExperimentKind::stationary: return "stationary";
    case ExperimentKind::baseline: return "baseline";
    case ExperimentKind::hierarchy: return "hierarchy";
    case ExperimentKind::reach: return "reach";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_from_name(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::settle, ExperimentKind::scaling, ExperimentKind::worst_case,
        ExperimentKind::stationary, ExperimentKind::baseline, ExperimentKind::hierarchy,
        ExperimentKind::reach})
    if (name == experiment_name(k)) return k;
  if (name == "worst-case") return ExperimentKind::worst_case;
  return std::nullopt;
}

std::string validate(const ExperimentConfig& cfg) {
  std::ostringstream bad;
  const auto kind = cfg.experiment;
  if (cfg.m > (uint64_t(1) << 24)) bad << "m above supported maximum 2^24; ";
  switch (kind) {
    case ExperimentKind::settle:
      if (cfg.n < 2) bad << "settle needs n >= 2; ";
      if (cfg.n > cfg.m) bad << "n may not exceed m; ";
      if (cfg.steps < 1) bad << "steps must be >= 1; ";
      if (cfg.probes_per_step < 1) bad << "probes must be >= 1; ";
      if (cfg.shortcut_count < 1) bad << "settle needs at least one shortcut per node; ";
      break;
    case ExperimentKind::scaling:
    case ExperimentKind::worst_case:
      if (cfg.n < 2) bad << "n must be >= 2; ";
      if (cfg.trials < 1) bad << "trials must be >= 1; ";
      if (cfg.shortcut_count < 1) bad << "static overlays need at least one shortcut; ";
      break;
    case ExperimentKind::stationary:
      if (cfg.n < 2 || cfg.n > 4096) bad << "stationary state count must lie in [2, 4096]; ";
      if (cfg.tol <= 0) bad << "tolerance must be positive; ";
      break;
    case ExperimentKind::baseline: {
      if (cfg.n < 2) bad << "n must be >= 2; ";
      if (cfg.c_local == 0 && cfg.c_short == 0) bad << "baseline ring needs some links; ";
      if (cfg.n < 2 * static_cast<uint64_t>(cfg.c_local) + 1) bad << "n too small for c_local; ";
      if (2 * static_cast<uint64_t>(cfg.c_local) + cfg.c_short > cfg.n - 1)
        bad << "degree exceeds n-1; ";
      if (cfg.budget_factor <= 0) bad << "budget factor must be positive; ";
      if (cfg.trials < 1) bad << "trials must be >= 1; ";
      break;
    }
    case ExperimentKind::hierarchy:
      if (cfg.n < 4) bad << "hierarchy needs n >= 4; ";
      if (cfg.trials < 1) bad << "trials must be >= 1; ";
      break;
    case ExperimentKind::reach:
      if (cfg.offsets.empty()) bad << "reach needs at least one offset; ";
      if (cfg.modulus < 2 || cfg.modulus > (uint64_t(1) << 24)) bad << "modulus must lie in [2, 2^24]; ";
      break;
  }
  return bad.str();
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) fail(Status::invalid_argument, "percentile of nothing");
  std::sort(values.begin(), values.end());
  const size_t rank = static_cast<size_t>(std::ceil(q * values.size()));
  return values[rank == 0 ? 0 : rank - 1];
}

double mann_kendall_z(std::span<const double> series) {
  const size_t n = series.size();
  if (n < 3) return 0.0;
  int64_t s = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      if (series[j] > series[i]) ++s;
      else if (series[j] < series[i]) --s;
    }
  // tie correction
  std::map<double, uint64_t> ties;
  for (double v : series) ties[v]++;
  double var = static_cast<double>(n) * (n - 1) * (2.0 * n + 5);
  for (const auto& [v, t] : ties)
    if (t > 1) var -= static_cast<double>(t) * (t - 1) * (2.0 * t + 5);
  var /= 18.0;
  if (var <= 0) return 0.0;
  if (s > 0) return (s - 1) / std::sqrt(var);
  if (s < 0) return (s + 1) / std::sqrt(var);
  return 0.0;
}

int64_t settled_step(std::span<const double> mean_hops, size_t window, size_t stride, double zcrit) {
  for (size_t end = window; end <= mean_hops.size(); end += stride) {
    const double z = mann_kendall_z(mean_hops.subspan(end - window, window));
    if (std::abs(z) < zcrit) return static_cast<int64_t>(end);
  }
  return -1;
}

namespace {

struct ProbeStats {
  double mean = 0.0, p99 = 0.0, resolved = 0.0;
  uint32_t max = 0;
};

ProbeStats probe_batch(const Overlay& o, uint32_t probes, Rng& rng) {
  std::vector<double> hops;
  hops.reserve(probes);
  ProbeStats st;
  uint64_t resolved = 0;
  for (uint32_t i = 0; i < probes; ++i) {
    const Key src = o.random_key(rng);
    const Key dst = o.random_key_except(rng, src);
    const QueryTrace t = greedy_search(o, src, dst);
    hops.push_back(static_cast<double>(t.hops));
    st.max = std::max<uint32_t>(st.max, static_cast<uint32_t>(t.hops));
    resolved += t.resolved ? 1 : 0;
  }
  for (double h : hops) st.mean += h;
  st.mean /= probes;
  st.p99 = percentile(hops, 0.99);
  st.resolved = static_cast<double>(resolved) / probes;
  return st;
}

void push_common_metadata(Table& t, const ExperimentConfig& cfg) {
  t.metadata.emplace_back("experiment", experiment_name(cfg.experiment));
  t.metadata.emplace_back("seed", std::to_string(cfg.seed));
}

}  // namespace

std::vector<MetricsRecord> run_settling(const ExperimentConfig& cfg) {
  Rng build(cfg.seed, Stream::build);
  Overlay o = Overlay::bootstrap_uniform_start(cfg.n, {cfg.m, cfg.n}, build, cfg.shortcut_count);
  o.set_seed(cfg.seed);

  std::optional<Overlay> control;
  if (cfg.comparison) control = o;  // same bootstrap state, shortcuts frozen

  Rng adaptive(cfg.seed, Stream::adaptive);
  Rng probes(cfg.seed, Stream::probes);
  Rng control_probes(cfg.seed, Stream::control_probes);

  std::vector<MetricsRecord> out;
  out.reserve(cfg.steps);
  for (uint32_t step = 1; step <= cfg.steps; ++step) {
    // one adaptive query: a random requester asks for a random live target,
    // and the answering node reconsiders its shortcut
    const Key requester = o.random_key(adaptive);
    const Key target = o.random_key_except(adaptive, requester);
    o.process_answered_query(target, requester, adaptive);

    MetricsRecord rec;
    rec.step = step;
    rec.adaptive_queries = step;
    const ProbeStats st = probe_batch(o, cfg.probes_per_step, probes);
    rec.mean_hops = st.mean;
    rec.p99_hops = st.p99;
    rec.max_hops = st.max;
    rec.resolved_fraction = st.resolved;
    if (control) rec.control_mean_hops = probe_batch(*control, cfg.probes_per_step, control_probes).mean;
    out.push_back(rec);
  }
  return out;
}

Table settle_table(const ExperimentConfig& cfg, const std::vector<MetricsRecord>& records) {
  Table t;
  push_common_metadata(t, cfg);
  t.metadata.emplace_back("n", std::to_string(cfg.n));
  t.metadata.emplace_back("m", std::to_string(cfg.m));
  t.metadata.emplace_back("steps", std::to_string(cfg.steps));
  t.metadata.emplace_back("probes", std::to_string(cfg.probes_per_step));
  t.metadata.emplace_back("shortcuts", std::to_string(cfg.shortcut_count));
  t.metadata.emplace_back("comparison", cfg.comparison ? "1" : "0");

  t.columns = {"step", "adaptive_queries", "mean_hops", "p99_hops", "max_hops", "resolved_fraction"};
  t.kinds = {ColumnKind::integer, ColumnKind::integer, ColumnKind::real,
             ColumnKind::real,    ColumnKind::integer, ColumnKind::real};
  if (cfg.comparison) {
    t.columns.push_back("control_mean_hops");
    t.kinds.push_back(ColumnKind::real);
  }
  for (const MetricsRecord& r : records) {
    std::vector<double> row = {static_cast<double>(r.step), static_cast<double>(r.adaptive_queries),
                               r.mean_hops, r.p99_hops, static_cast<double>(r.max_hops),
                               r.resolved_fraction};
    if (cfg.comparison) row.push_back(r.control_mean_hops);
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

Table run_scaling(const ExperimentConfig& cfg) {
  Table t;
  push_common_metadata(t, cfg);
  t.metadata.emplace_back("trials", std::to_string(cfg.trials));
  t.metadata.emplace_back("shortcuts", std::to_string(cfg.shortcut_count));
  t.columns = {"n", "m", "queries", "mean_hops", "max_hops", "mean_over_ln2", "max_over_ln3"};
  t.kinds = {ColumnKind::integer, ColumnKind::integer, ColumnKind::integer, ColumnKind::real,
             ColumnKind::integer, ColumnKind::real,    ColumnKind::real};

  for (uint64_t n = 1 << 8; n <= (1 << 13); n <<= 1) {
    const uint64_t m = 16 * n;
    Rng build(cfg.seed, Stream::build, n);
    const Overlay o = Overlay::build_static(n, {m, n}, build, cfg.shortcut_count);
    Rng queries(cfg.seed, Stream::probes, n);
    double mean = 0.0;
    uint64_t max = 0;
    for (uint32_t q = 0; q < cfg.trials; ++q) {
      const Key src = o.random_key(queries);
      const Key dst = o.random_key_except(queries, src);
      const uint64_t hops = greedy_search(o, src, dst).hops;
      mean += static_cast<double>(hops);
      max = std::max(max, hops);
    }
    mean /= cfg.trials;
    const double ln = std::log(static_cast<double>(n));
    t.add_row({static_cast<double>(n), static_cast<double>(m), static_cast<double>(cfg.trials), mean,
               static_cast<double>(max), mean / (ln * ln), static_cast<double>(max) / (ln * ln * ln)});
  }
  return t;
}

Table run_worst_case(const ExperimentConfig& cfg) {
  const uint64_t m = 16 * cfg.n;
  Rng build(cfg.seed, Stream::build, cfg.n);
  const Overlay o = Overlay::build_static(cfg.n, {m, cfg.n}, build, cfg.shortcut_count);
  Rng queries(cfg.seed, Stream::probes, cfg.n);

  std::map<uint32_t, std::pair<uint64_t, uint64_t>> per_phase;  // phase -> (hops, traces touching it)
  std::map<uint32_t, uint64_t> max_in_phase;
  for (uint32_t q = 0; q < cfg.trials; ++q) {
    const Key src = o.random_key(queries);
    const Key dst = o.random_key_except(queries, src);
    const QueryTrace tr = greedy_search(o, src, dst);
    for (const auto& [phase, hops] : phase_hop_profile(tr)) {
      auto& agg = per_phase[phase];
      agg.first += hops;
      agg.second += 1;
      auto& mx = max_in_phase[phase];
      mx = std::max(mx, hops);
    }
  }

  Table t;
  push_common_metadata(t, cfg);
  t.metadata.emplace_back("n", std::to_string(cfg.n));
  t.metadata.emplace_back("m", std::to_string(m));
  t.metadata.emplace_back("trials", std::to_string(cfg.trials));
  t.columns = {"n", "phase", "traces", "mean_hops_in_phase", "max_hops_in_phase"};
  t.kinds = {ColumnKind::integer, ColumnKind::integer, ColumnKind::integer, ColumnKind::real,
             ColumnKind::integer};
  for (const auto& [phase, agg] : per_phase)
    t.add_row({static_cast<double>(cfg.n), static_cast<double>(phase),
               static_cast<double>(agg.second),
               static_cast<double>(agg.first) / static_cast<double>(agg.second),
               static_cast<double>(max_in_phase[phase])});
  return t;
}

Table run_stationary(const ExperimentConfig& cfg) {
  const uint32_t n = static_cast<uint32_t>(cfg.n);
  const auto analytic = analytic_harmonic(n);
  const auto computed = stationary_distribution(transition_matrix(n), cfg.tol);

  Table t;
  push_common_metadata(t, cfg);
  t.metadata.emplace_back("states", std::to_string(n));
  t.metadata.emplace_back("tol", format_cell(cfg.tol, ColumnKind::real));
  t.metadata.emplace_back("iterations", std::to_string(computed.iterations));
  t.columns = {"state", "analytic_p", "computed_p", "abs_err"};
  t.kinds = {ColumnKind::integer, ColumnKind::real, ColumnKind::real, ColumnKind::real};
  for (uint32_t x = 1; x <= n; ++x)
    t.add_row({static_cast<double>(x), analytic[x - 1], computed.p[x - 1],
               std::abs(analytic[x - 1] - computed.p[x - 1])});
  return t;
}

Table run_baseline(const ExperimentConfig& cfg) {
  UniformRingConfig ring{cfg.n, cfg.c_local, cfg.c_short, cfg.m_exp};
  Rng build(cfg.seed, Stream::build);
  const Overlay o = build_uniform_ring(ring, build);

  const double lnm = std::ceil(std::pow(std::log(static_cast<double>(cfg.n)), cfg.m_exp));
  const uint64_t budget = static_cast<uint64_t>(std::llround(cfg.budget_factor * lnm));
  const uint64_t far = budget * cfg.c_local;

  Rng queries(cfg.seed, Stream::queries);
  uint64_t successes = 0;
  for (uint32_t q = 0; q < cfg.trials; ++q) {
    Key src, dst;
    do {
      src = o.random_key(queries);
      dst = o.random_key_except(queries, src);
    } while (cfg.far_pairs && ring_distance(src, dst, cfg.n) <= far);
    if (bounded_greedy_search(o, src, dst, budget).success) ++successes;
  }

  const FreenetBounds bounds = freenet_bound(ring);
  Table t;
  push_common_metadata(t, cfg);
  t.metadata.emplace_back("trials", std::to_string(cfg.trials));
  t.metadata.emplace_back("m_exp", std::to_string(cfg.m_exp));
  t.metadata.emplace_back("budget_factor", format_cell(cfg.budget_factor, ColumnKind::real));
  t.metadata.emplace_back("far_pairs", cfg.far_pairs ? "1" : "0");
  if (cfg.far_pairs) t.metadata.emplace_back("far_pair_min_distance", std::to_string(far + 1));
  t.columns = {"n",      "c_local",      "c_short",
               "epsilon", "budget",      "success_rate",
               "analytic_failure_bound", "analytic_success_bound"};
  t.kinds = {ColumnKind::integer, ColumnKind::integer, ColumnKind::integer, ColumnKind::real,
             ColumnKind::integer, ColumnKind::real,    ColumnKind::real,    ColumnKind::real};
  t.add_row({static_cast<double>(cfg.n), static_cast<double>(cfg.c_local),
             static_cast<double>(cfg.c_short), uniform_ring_epsilon(ring),
             static_cast<double>(budget), static_cast<double>(successes) / cfg.trials,
             bounds.failure_upper, bounds.success_upper_small_eps});
  return t;
}

Table run_hierarchy(const ExperimentConfig& cfg) {
  const uint64_t m = 16 * cfg.n;
  Rng build(cfg.seed, Stream::build, cfg.n);
  const Overlay flat = Overlay::build_static(cfg.n, {m, cfg.n}, build, 1);
  const HierarchyLabels labels = build_labels(cfg.n);
  Rng links(cfg.seed, Stream::links, cfg.n);
  const Overlay nested = build_nested_overlay(flat, labels, links);

  Rng queries(cfg.seed, Stream::probes, cfg.n);
  double nested_mean = 0.0, flat_mean = 0.0;
  for (uint32_t q = 0; q < cfg.trials; ++q) {
    const Key src = flat.random_key(queries);
    const Key dst = flat.random_key_except(queries, src);
    flat_mean += static_cast<double>(greedy_search(flat, src, dst).hops);
    nested_mean += static_cast<double>(hierarchical_greedy_search(nested, src, dst).hops);
  }
  flat_mean /= cfg.trials;
  nested_mean /= cfg.trials;

  Table t;
  push_common_metadata(t, cfg);
  t.metadata.emplace_back("m", std::to_string(m));
  t.metadata.emplace_back("trials", std::to_string(cfg.trials));
  t.columns = {"n", "depth", "cache_size", "mean_hops", "flat_mean_hops"};
  t.kinds = {ColumnKind::integer, ColumnKind::integer, ColumnKind::integer, ColumnKind::real,
             ColumnKind::real};
  t.add_row({static_cast<double>(cfg.n), static_cast<double>(labels.depth()),
             static_cast<double>(labels.depth() + 2), nested_mean, flat_mean});
  return t;
}

Table run_reach(const ExperimentConfig& cfg) {
  const OffsetScheme scheme{cfg.offsets, cfg.modulus, cfg.signed_steps};
  Table t;
  push_common_metadata(t, cfg);
  t.metadata.emplace_back("modulus", std::to_string(cfg.modulus));
  t.metadata.emplace_back("signed", cfg.signed_steps ? "1" : "0");
  std::string offs;
  for (size_t i = 0; i < cfg.offsets.size(); ++i)
    offs += (i ? "," : "") + std::to_string(cfg.offsets[i]);
  t.metadata.emplace_back("offsets", offs);

  t.columns = {"steps", "reach", "bound"};
  t.kinds = {ColumnKind::integer, ColumnKind::integer, ColumnKind::real};
  const double d = static_cast<double>(cfg.offsets.size());
  for (uint64_t s = 0; s <= cfg.reach_steps; ++s)
    t.add_row({static_cast<double>(s), static_cast<double>(reach_set_size(scheme, s)),
               std::pow(2.0 * static_cast<double>(s) + 1.0, d)});
  return t;
}

}  // namespace

Table run_experiment(const ExperimentConfig& cfg) {
  const std::string problem = validate(cfg);
  if (!problem.empty()) fail(Status::invalid_argument, problem);
  switch (cfg.experiment) {
    case ExperimentKind::settle: return settle_table(cfg, run_settling(cfg));
    case ExperimentKind::scaling: return run_scaling(cfg);
    case ExperimentKind::worst_case: return run_worst_case(cfg);
    case ExperimentKind::stationary: return run_stationary(cfg);
    case ExperimentKind::baseline: return run_baseline(cfg);
    case ExperimentKind::hierarchy: return run_hierarchy(cfg);
    case ExperimentKind::reach: return run_reach(cfg);
  }
  fail(Status::internal, "unhandled experiment kind");
}

}  // namespace dhtsim
