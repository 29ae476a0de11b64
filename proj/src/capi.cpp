#include "dhtsim/dhtsim.h"

#include <cstring>
#include <fstream>
#include <string>

#include "adaptation.hpp"
#include "experiments.hpp"
#include "overlay.hpp"
#include "routing.hpp"

using namespace dhtsim;

namespace {

thread_local std::string g_last_error;

dht_status to_c_status(Status s) {
  switch (s) {
    case Status::ok: return DHT_OK;
    case Status::invalid_argument: return DHT_ERR_INVALID_ARGUMENT;
    case Status::capacity: return DHT_ERR_CAPACITY;
    case Status::duplicate_key: return DHT_ERR_DUPLICATE_KEY;
    case Status::unknown_key: return DHT_ERR_UNKNOWN_KEY;
    case Status::underflow: return DHT_ERR_UNDERFLOW;
    case Status::no_convergence: return DHT_ERR_NO_CONVERGENCE;
    case Status::io_error: return DHT_ERR_IO;
    case Status::internal: return DHT_ERR_INTERNAL;
  }
  return DHT_ERR_INTERNAL;
}

template <typename Fn>
dht_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DHT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_c_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DHT_ERR_INTERNAL;
  }
}

}  // namespace

struct dht_overlay {
  Overlay overlay;
  Rng churn;
};

extern "C" {

const char* dht_status_name(dht_status s) {
  switch (s) {
    case DHT_OK: return "ok";
    case DHT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case DHT_ERR_CAPACITY: return "capacity";
    case DHT_ERR_DUPLICATE_KEY: return "duplicate_key";
    case DHT_ERR_UNKNOWN_KEY: return "unknown_key";
    case DHT_ERR_UNDERFLOW: return "underflow";
    case DHT_ERR_NO_CONVERGENCE: return "no_convergence";
    case DHT_ERR_IO: return "io_error";
    case DHT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* dht_last_error(void) { return g_last_error.c_str(); }

const char* dht_version(void) { return "1.0.0"; }

dht_status dht_overlay_bootstrap(uint64_t n, uint64_t m, uint64_t seed, uint32_t shortcuts,
                                 dht_overlay** out) {
  if (!out) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    Rng build(seed, Stream::build);
    Overlay o = Overlay::bootstrap(n, {m, n}, build, shortcuts);
    o.set_seed(seed);
    *out = new dht_overlay{std::move(o), Rng(seed, Stream::churn)};
  });
}

dht_status dht_overlay_build_static(uint64_t n, uint64_t m, uint64_t seed, uint32_t shortcuts,
                                    dht_overlay** out) {
  if (!out) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    Rng build(seed, Stream::build);
    Overlay o = Overlay::build_static(n, {m, n}, build, shortcuts);
    o.set_seed(seed);
    *out = new dht_overlay{std::move(o), Rng(seed, Stream::churn)};
  });
}

void dht_overlay_free(dht_overlay* o) { delete o; }

uint64_t dht_overlay_node_count(const dht_overlay* o) { return o ? o->overlay.size() : 0; }

uint64_t dht_overlay_ring_size(const dht_overlay* o) { return o ? o->overlay.ring_size() : 0; }

int dht_overlay_contains(const dht_overlay* o, uint64_t key) {
  return o && key < o->overlay.ring_size() && o->overlay.contains(key) ? 1 : 0;
}

dht_status dht_overlay_closest_key(const dht_overlay* o, uint64_t target, uint64_t* out_key) {
  if (!o || !out_key) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    if (target >= o->overlay.ring_size()) fail(Status::invalid_argument, "target outside the ring");
    *out_key = o->overlay.closest_key(target);
  });
}

dht_status dht_overlay_join(dht_overlay* o, uint64_t key) {
  if (!o) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] { o->overlay.join(key, o->overlay.random_key(o->churn), o->churn); });
}

dht_status dht_overlay_join_at(dht_overlay* o, uint64_t key, uint64_t bootstrap_key) {
  if (!o) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] { o->overlay.join(key, bootstrap_key, o->churn); });
}

dht_status dht_overlay_leave(dht_overlay* o, uint64_t key) {
  if (!o) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] { o->overlay.leave(key, o->churn); });
}

dht_status dht_overlay_refresh(dht_overlay* o, uint64_t key) {
  if (!o) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] { o->overlay.refresh_shortcut(key, o->churn); });
}

dht_status dht_overlay_answer_query(dht_overlay* o, uint64_t answerer, uint64_t requester) {
  if (!o) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] { o->overlay.process_answered_query(answerer, requester, o->churn); });
}

dht_status dht_overlay_query(const dht_overlay* o, uint64_t source, uint64_t target,
                             dht_query_result* out) {
  if (!o || !out) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const QueryTrace t = greedy_search(o->overlay, source, target);
    out->terminal = t.terminal;
    out->hops = t.hops;
    out->resolved = t.resolved ? 1 : 0;
  });
}

dht_status dht_overlay_check(const dht_overlay* o) {
  if (!o) return DHT_ERR_INVALID_ARGUMENT;
  const std::string problems = o->overlay.check();
  if (problems.empty()) {
    g_last_error.clear();
    return DHT_OK;
  }
  g_last_error = problems;
  return DHT_ERR_INTERNAL;
}

dht_status dht_overlay_save(const dht_overlay* o, const char* path) {
  if (!o || !path) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(Status::io_error, std::string("cannot open ") + path + " for writing");
    o->overlay.save(os);
    if (!os) fail(Status::io_error, std::string("write to ") + path + " failed");
  });
}

dht_status dht_overlay_load(const char* path, dht_overlay** out) {
  if (!path || !out) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(Status::io_error, std::string("cannot open ") + path);
    Overlay o = Overlay::load(is);
    const uint64_t seed = o.seed();
    *out = new dht_overlay{std::move(o), Rng(seed, Stream::churn)};
  });
}

dht_status dht_stationary_distribution(uint32_t states, double tol, double* out) {
  if (!out) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const StationaryResult r = stationary_distribution(transition_matrix(states), tol);
    std::memcpy(out, r.p.data(), states * sizeof(double));
  });
}

void dht_experiment_config_init(dht_experiment experiment, dht_experiment_config* cfg) {
  if (!cfg) return;
  std::memset(cfg, 0, sizeof *cfg);
  cfg->experiment = experiment;
  ExperimentConfig d;  // library defaults
  cfg->n = d.n;
  cfg->m = d.m;
  cfg->seed = d.seed;
  cfg->probes_per_step = d.probes_per_step;
  cfg->steps = d.steps;
  cfg->trials = d.trials;
  cfg->shortcuts = d.shortcut_count;
  cfg->comparison = d.comparison ? 1 : 0;
  cfg->c_local = d.c_local;
  cfg->c_short = d.c_short;
  cfg->m_exp = d.m_exp;
  cfg->budget_factor = d.budget_factor;
  cfg->far_pairs = d.far_pairs ? 1 : 0;
  cfg->tol = d.tol;
  cfg->modulus = d.modulus;
  cfg->reach_steps = d.reach_steps;
  cfg->signed_steps = d.signed_steps ? 1 : 0;
  if (experiment == DHT_EXPERIMENT_STATIONARY) cfg->n = 128;
  if (experiment == DHT_EXPERIMENT_HIERARCHY) cfg->n = 4096;
  if (experiment == DHT_EXPERIMENT_WORST_CASE) cfg->n = 4096;
}

dht_status dht_run_experiment(const dht_experiment_config* cfg, dht_format format,
                              const char* out_path) {
  if (!cfg) return DHT_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    ExperimentConfig c;
    switch (cfg->experiment) {
      case DHT_EXPERIMENT_SETTLE: c.experiment = ExperimentKind::settle; break;
      case DHT_EXPERIMENT_SCALING: c.experiment = ExperimentKind::scaling; break;
      case DHT_EXPERIMENT_WORST_CASE: c.experiment = ExperimentKind::worst_case; break;
      case DHT_EXPERIMENT_STATIONARY: c.experiment = ExperimentKind::stationary; break;
      case DHT_EXPERIMENT_BASELINE: c.experiment = ExperimentKind::baseline; break;
      case DHT_EXPERIMENT_HIERARCHY: c.experiment = ExperimentKind::hierarchy; break;
      case DHT_EXPERIMENT_REACH: c.experiment = ExperimentKind::reach; break;
      default: fail(Status::invalid_argument, "unknown experiment");
    }
    c.n = cfg->n;
    c.m = cfg->m;
    c.seed = cfg->seed;
    c.probes_per_step = cfg->probes_per_step;
    c.steps = cfg->steps;
    c.trials = cfg->trials;
    c.shortcut_count = cfg->shortcuts;
    c.comparison = cfg->comparison != 0;
    c.c_local = cfg->c_local;
    c.c_short = cfg->c_short;
    c.m_exp = cfg->m_exp;
    c.budget_factor = cfg->budget_factor;
    c.far_pairs = cfg->far_pairs != 0;
    c.tol = cfg->tol;
    if (cfg->offsets && cfg->offsets_len > 0)
      c.offsets.assign(cfg->offsets, cfg->offsets + cfg->offsets_len);
    c.modulus = cfg->modulus;
    c.reach_steps = cfg->reach_steps;
    c.signed_steps = cfg->signed_steps != 0;

    const Table t = run_experiment(c);
    emit_file(t, format == DHT_FORMAT_JSON ? Format::json : Format::csv,
              out_path ? std::string(out_path) : std::string());
  });
}

}  // extern "C"
