/* C interface to the duality lab core.
 *
 * All entry points are thread-safe with respect to distinct handles; a single
 * dl_config must not be mutated concurrently.  Functions returning dl_status
 * set a thread-local message retrievable via dl_last_error on failure.
 */
#ifndef DUALITY_DUALITY_H
#define DUALITY_DUALITY_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dl_status {
  DL_OK = 0,
  DL_ERR_RELATION_VIOLATION = 1,
  DL_ERR_CONFIG = 2,
  DL_ERR_NO_CONVERGENCE = 3,
  DL_ERR_INVALID_ARGUMENT = 4,
  DL_ERR_INTERNAL = 5
} dl_status;

/* Library version as "major.minor.patch". */
const char* dl_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* dl_last_error(void);

/* Enumerates the verifiable relations. Index range: [0, dl_relation_count). */
int dl_relation_count(void);
const char* dl_relation_name(int index);

/* Campaign configuration handle.  Keys and value syntax match the config
 * file format: relations, trials, seed, tol, n_min, n_max, env_min, env_max,
 * coupling, coupler, out. */
typedef struct dl_config dl_config;

dl_config* dl_config_new(void);
void dl_config_free(dl_config* config);
dl_status dl_config_set(dl_config* config, const char* key, const char* value);
dl_status dl_config_load_file(dl_config* config, const char* path);

/* Writes the current value of a config key into buffer (NUL-terminated,
 * truncated to size).  Returns DL_ERR_CONFIG for unknown keys. */
dl_status dl_config_get(const dl_config* config, const char* key, char* buffer, size_t size);

typedef struct dl_campaign_summary {
  long trials;
  long violations;
  long nonconvergences;
  double min_slack;
  int min_slack_valid;
} dl_campaign_summary;

/* One JSON line per trial; invoked on the calling thread, ordered by
 * (relation, trial index).  callback may be NULL. */
typedef void (*dl_record_callback)(const char* json_line, void* user);

dl_status dl_run_check(const dl_config* config, dl_record_callback callback, void* user,
                       dl_campaign_summary* summary);

typedef struct dl_example1_report {
  int n;
  double pguess;
  double distinguishability;
  double naive_visibility;
  double dark_probability;
  double visibility;
  double tradeoff_slack;
} dl_example1_report;

/* Canonical lopsided-superposition example; requires n >= 3. */
dl_status dl_run_example1(int n, uint64_t seed, double tol, dl_example1_report* report);

typedef struct dl_sweep_point {
  double gamma;
  double d;
  double v;
  double sum_sq;
  double slack;
} dl_sweep_point;

/* Scalar-coupling sweep over a strictly increasing gamma grid; points must
 * have room for count entries, written in ascending gamma order.  monotone
 * (optional) is set to 1 when distinguishability is nonincreasing. */
dl_status dl_run_sweep(int n, const double* gammas, size_t count, uint64_t seed, double tol,
                       dl_sweep_point* points, int* monotone);

#ifdef __cplusplus
}
#endif

#endif /* DUALITY_DUALITY_H */
