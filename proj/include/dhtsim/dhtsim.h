/* dhtsim — simulator for a ring DHT with inverse-distance shortcut caching.
 *
 * C interface of the shared library. Handles are opaque; every fallible call
 * returns a dht_status, and dht_last_error() describes the most recent
 * failure on the calling thread.
 */
#ifndef DHTSIM_H
#define DHTSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dht_status {
  DHT_OK = 0,
  DHT_ERR_INVALID_ARGUMENT = 1,
  DHT_ERR_CAPACITY = 2,
  DHT_ERR_DUPLICATE_KEY = 3,
  DHT_ERR_UNKNOWN_KEY = 4,
  DHT_ERR_UNDERFLOW = 5,
  DHT_ERR_NO_CONVERGENCE = 6,
  DHT_ERR_IO = 7,
  DHT_ERR_INTERNAL = 8
} dht_status;

const char* dht_status_name(dht_status s);
const char* dht_last_error(void); /* thread-local; empty string if none */
const char* dht_version(void);

/* ---------------------------------------------------------------- overlay */

typedef struct dht_overlay dht_overlay;

/* n random keys on a ring of m positions, grown by routed joins from a
 * two-node seed. The handle owns a churn RNG derived from `seed`. */
dht_status dht_overlay_bootstrap(uint64_t n, uint64_t m, uint64_t seed, uint32_t shortcuts,
                                 dht_overlay** out);
/* Oracle placement with exact harmonic shortcuts (static experiment builds). */
dht_status dht_overlay_build_static(uint64_t n, uint64_t m, uint64_t seed, uint32_t shortcuts,
                                    dht_overlay** out);
void dht_overlay_free(dht_overlay* o);

uint64_t dht_overlay_node_count(const dht_overlay* o);
uint64_t dht_overlay_ring_size(const dht_overlay* o);
int dht_overlay_contains(const dht_overlay* o, uint64_t key);
dht_status dht_overlay_closest_key(const dht_overlay* o, uint64_t target, uint64_t* out_key);

dht_status dht_overlay_join(dht_overlay* o, uint64_t key); /* random bootstrap node */
dht_status dht_overlay_join_at(dht_overlay* o, uint64_t key, uint64_t bootstrap_key);
dht_status dht_overlay_leave(dht_overlay* o, uint64_t key);
dht_status dht_overlay_refresh(dht_overlay* o, uint64_t key);
/* Result-6 cache update on the answering node. */
dht_status dht_overlay_answer_query(dht_overlay* o, uint64_t answerer, uint64_t requester);

typedef struct dht_query_result {
  uint64_t terminal;
  uint64_t hops;
  int resolved;
} dht_query_result;

dht_status dht_overlay_query(const dht_overlay* o, uint64_t source, uint64_t target,
                             dht_query_result* out);

/* Full invariant audit: DHT_OK or DHT_ERR_INTERNAL with details in
 * dht_last_error(). */
dht_status dht_overlay_check(const dht_overlay* o);

/* Line-oriented snapshot format: "M=<m> N=<n> seed=<seed>" header, then one
 * "key,left,right,shortcut..." line per node in ascending key order. */
dht_status dht_overlay_save(const dht_overlay* o, const char* path);
dht_status dht_overlay_load(const char* path, dht_overlay** out);

/* ----------------------------------------------------------- adaptation */

/* Stationary vector of the cache-update chain with `states` states, solved by
 * power iteration to total-variation `tol`; out must hold `states` doubles. */
dht_status dht_stationary_distribution(uint32_t states, double tol, double* out);

/* ----------------------------------------------------------- experiments */

typedef enum dht_experiment {
  DHT_EXPERIMENT_SETTLE = 0,
  DHT_EXPERIMENT_SCALING = 1,
  DHT_EXPERIMENT_WORST_CASE = 2,
  DHT_EXPERIMENT_STATIONARY = 3,
  DHT_EXPERIMENT_BASELINE = 4,
  DHT_EXPERIMENT_HIERARCHY = 5,
  DHT_EXPERIMENT_REACH = 6
} dht_experiment;

typedef enum dht_format { DHT_FORMAT_CSV = 0, DHT_FORMAT_JSON = 1 } dht_format;

typedef struct dht_experiment_config {
  dht_experiment experiment;
  uint64_t n;
  uint64_t m;
  uint64_t seed;
  uint32_t probes_per_step;
  uint32_t steps;
  uint32_t trials;
  uint32_t shortcuts;
  int comparison;
  /* baseline */
  uint32_t c_local;
  uint32_t c_short;
  uint32_t m_exp;
  double budget_factor;
  int far_pairs;
  /* stationary */
  double tol;
  /* reach */
  const int64_t* offsets;
  size_t offsets_len;
  uint64_t modulus;
  uint32_t reach_steps;
  int signed_steps;
} dht_experiment_config;

/* Fills `cfg` with the documented defaults for the given experiment. */
void dht_experiment_config_init(dht_experiment experiment, dht_experiment_config* cfg);

/* Runs the experiment and writes CSV/JSON to `out_path` (NULL or "-" for
 * stdout). Invalid configs yield DHT_ERR_INVALID_ARGUMENT before any work. */
dht_status dht_run_experiment(const dht_experiment_config* cfg, dht_format format,
                              const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* DHTSIM_H */
