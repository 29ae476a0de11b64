// simulate — experiment driver for the dhtsim shared library.
//
// One subcommand per experiment; every flag can also come from an INI-style
// key-value file passed with --config, with command-line flags taking
// precedence. Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dhtsim/dhtsim.h"

namespace {

struct Options {
  uint64_t n = 0;
  uint64_t m = 0;
  uint64_t seed = 1;
  uint32_t probes = 100;
  uint32_t steps = 5000;
  uint32_t trials = 10000;
  uint32_t shortcuts = 1;
  bool comparison = false;
  uint32_t c_local = 1;
  uint32_t c_short = 1;
  uint32_t m_exp = 1;
  double budget_factor = 2.0;
  bool far_pairs = false;
  double tol = 1e-12;
  std::vector<int64_t> offsets;
  uint64_t modulus = 65536;
  uint32_t reach_steps = 16;
  bool unsigned_steps = false;
  std::string out;
  std::string format = "csv";
};

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--seed", opt.seed, "random seed; fully determines the run");
  cmd->add_option("--out", opt.out, "output path (default: stdout)");
  cmd->add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->set_config("--config", "", "key-value file with the same names as the flags");
}

int run(dht_experiment kind, const Options& opt, bool have_n, bool have_m) {
  dht_experiment_config cfg;
  dht_experiment_config_init(kind, &cfg);
  if (have_n) cfg.n = opt.n;
  if (have_m) cfg.m = opt.m;
  cfg.seed = opt.seed;
  cfg.probes_per_step = opt.probes;
  cfg.steps = opt.steps;
  cfg.trials = opt.trials;
  cfg.shortcuts = opt.shortcuts;
  cfg.comparison = opt.comparison ? 1 : 0;
  cfg.c_local = opt.c_local;
  cfg.c_short = opt.c_short;
  cfg.m_exp = opt.m_exp;
  cfg.budget_factor = opt.budget_factor;
  cfg.far_pairs = opt.far_pairs ? 1 : 0;
  cfg.tol = opt.tol;
  cfg.offsets = opt.offsets.empty() ? nullptr : opt.offsets.data();
  cfg.offsets_len = opt.offsets.size();
  cfg.modulus = opt.modulus;
  cfg.reach_steps = opt.reach_steps;
  cfg.signed_steps = opt.unsigned_steps ? 0 : 1;

  const dht_format fmt = opt.format == "json" ? DHT_FORMAT_JSON : DHT_FORMAT_CSV;
  const dht_status st = dht_run_experiment(&cfg, fmt, opt.out.empty() ? nullptr : opt.out.c_str());
  if (st == DHT_OK) return 0;
  std::fprintf(stderr, "error (%s): %s\n", dht_status_name(st), dht_last_error());
  return st == DHT_ERR_INVALID_ARGUMENT ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulate — ring DHT with inverse-distance shortcut caching"};
  app.require_subcommand(1);
  Options opt;

  auto* settle = app.add_subcommand(
      "settle", "adaptive cache updates from a uniform-shortcut start, hop counts per step");
  auto* n_settle = settle->add_option("--n", opt.n, "live nodes")->default_val(1000);
  auto* m_settle = settle->add_option("--m", opt.m, "ring positions")->default_val(10000);
  settle->add_option("--steps", opt.steps, "adaptive steps")->capture_default_str();
  settle->add_option("--probes", opt.probes, "measurement queries per step")->capture_default_str();
  settle->add_option("--shortcuts", opt.shortcuts, "shortcut slots per node")->capture_default_str();
  settle->add_flag("--comparison", opt.comparison, "also probe a frozen uniform-shortcut control");
  add_common_flags(settle, opt);

  auto* scaling = app.add_subcommand(
      "scaling", "mean/max hops on static harmonic overlays, n = 2^8 .. 2^13, m = 16n");
  scaling->add_option("--trials", opt.trials, "queries per overlay")->capture_default_str();
  scaling->add_option("--shortcuts", opt.shortcuts, "shortcut slots per node")->capture_default_str();
  add_common_flags(scaling, opt);

  auto* worst = app.add_subcommand("worst-case", "per-phase hop profile on one static overlay");
  auto* n_worst = worst->add_option("--n", opt.n, "live nodes")->default_val(4096);
  worst->add_option("--trials", opt.trials, "queries")->capture_default_str();
  worst->add_option("--shortcuts", opt.shortcuts, "shortcut slots per node")->capture_default_str();
  add_common_flags(worst, opt);

  auto* stationary =
      app.add_subcommand("stationary", "cache-update chain fixed point vs the harmonic law");
  auto* n_stat = stationary->add_option("--n", opt.n, "chain states")->default_val(128);
  stationary->add_option("--tol", opt.tol, "power iteration tolerance")->capture_default_str();
  add_common_flags(stationary, opt);

  auto* baseline = app.add_subcommand(
      "baseline", "bounded greedy success rate on the uniform-shortcut ring, with analytic bounds");
  auto* n_base = baseline->add_option("--n", opt.n, "ring size (fully occupied)")->default_val(10000);
  baseline->add_option("--c-local", opt.c_local, "local neighbors per side")->capture_default_str();
  baseline->add_option("--c-short", opt.c_short, "uniform shortcuts per node")->capture_default_str();
  baseline->add_option("--m-exp", opt.m_exp, "polylog exponent m")->capture_default_str();
  baseline->add_option("--budget-factor", opt.budget_factor, "budget = factor * ceil(ln^m n)")
      ->capture_default_str();
  baseline->add_flag("--far-pairs", opt.far_pairs,
                     "sample only pairs farther apart than budget * c_local");
  baseline->add_option("--trials", opt.trials, "query pairs")->capture_default_str();
  add_common_flags(baseline, opt);

  auto* hierarchy = app.add_subcommand(
      "hierarchy", "nested-shortcut overlay vs the flat single-shortcut overlay, paired queries");
  auto* n_hier = hierarchy->add_option("--n", opt.n, "live nodes")->default_val(4096);
  hierarchy->add_option("--trials", opt.trials, "query pairs")->capture_default_str();
  add_common_flags(hierarchy, opt);

  auto* reach = app.add_subcommand(
      "reach", "exact reachable-set growth of a commuting deterministic offset scheme");
  reach->add_option("--offsets", opt.offsets, "cache offsets c_1,...,c_d")
      ->required()
      ->delimiter(',');
  reach->add_option("--modulus", opt.modulus, "ring size")->capture_default_str();
  reach->add_option("--steps", opt.reach_steps, "maximum step count")->capture_default_str();
  reach->add_flag("--unsigned", opt.unsigned_steps, "hops may only add offsets, never subtract");
  add_common_flags(reach, opt);

  CLI11_PARSE(app, argc, argv);

  // subcommands with a --n/--m option always carry a value (CLI11 fills the
  // default), the fixed-sweep ones never override the library config
  (void)n_settle; (void)m_settle; (void)n_worst; (void)n_stat; (void)n_base; (void)n_hier;
  if (settle->parsed()) return run(DHT_EXPERIMENT_SETTLE, opt, true, true);
  if (scaling->parsed()) return run(DHT_EXPERIMENT_SCALING, opt, false, false);
  if (worst->parsed()) return run(DHT_EXPERIMENT_WORST_CASE, opt, true, false);
  if (stationary->parsed()) return run(DHT_EXPERIMENT_STATIONARY, opt, true, false);
  if (baseline->parsed()) return run(DHT_EXPERIMENT_BASELINE, opt, true, false);
  if (hierarchy->parsed()) return run(DHT_EXPERIMENT_HIERARCHY, opt, true, false);
  if (reach->parsed()) return run(DHT_EXPERIMENT_REACH, opt, false, false);
  return 1;
}
