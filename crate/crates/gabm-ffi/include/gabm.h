/* C interface to the gabm epidemic simulator. */

#ifndef GABM_H
#define GABM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes; nonzero mirrors the CLI exit-code contract.
 */
typedef enum GabmStatus {
  GABM_STATUS_OK = 0,
  GABM_STATUS_ERR_CONFIG = 2,
  GABM_STATUS_ERR_BACKEND = 3,
  GABM_STATUS_ERR_IO = 4,
  GABM_STATUS_ERR_NULL_ARG = 5,
  GABM_STATUS_ERR_UTF8 = 6,
} GabmStatus;

/**
 * Opaque simulation handle.
 */
typedef struct GabmSim GabmSim;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *gabm_version(void);

/**
 * Description of the last error on this thread, or NULL if none.
 * The caller owns the returned string (free with `gabm_string_free`).
 */
char *gabm_last_error(void);

/**
 * Create a simulation from a named preset (see the CLI's `presets`
 * command), overriding its seed. `backend` is one of "oracle",
 * "always-out", "always-home", "llm".
 *
 * # Safety
 * `preset_name` and `backend` must be valid NUL-terminated strings;
 * `out_sim` must be a valid pointer.
 */
enum GabmStatus gabm_sim_from_preset(const char *preset_name,
                                     const char *backend,
                                     uint64_t seed,
                                     struct GabmSim **out_sim);

/**
 * Create a simulation from a world-configuration JSON document with fields
 * initial_healthy, initial_infected, contact_rate, infection_rate,
 * step_count, condition ("base" | "self_health" | "full"), seed, run_name.
 *
 * # Safety
 * `config_json` and `backend` must be valid NUL-terminated strings;
 * `out_sim` must be a valid pointer.
 */
enum GabmStatus gabm_sim_from_config_json(const char *config_json,
                                          const char *backend,
                                          struct GabmSim **out_sim);

/**
 * Load a checkpoint file and attach a backend to it.
 *
 * # Safety
 * `path` and `backend` must be valid NUL-terminated strings; `out_sim`
 * must be a valid pointer.
 */
enum GabmStatus gabm_sim_load_checkpoint(const char *path,
                                         const char *backend,
                                         struct GabmSim **out_sim);

/**
 * Advance one day. `out_finished` (optional) is set to true when the run
 * has reached its horizon or stopped early; stepping a finished simulation
 * is a no-op that reports finished.
 *
 * # Safety
 * `sim` must be a live handle from this library; `out_finished` must be
 * NULL or valid.
 */
enum GabmStatus gabm_sim_step(struct GabmSim *sim, bool *out_finished);

/**
 * Run to the horizon or early stop.
 *
 * # Safety
 * `sim` must be a live handle from this library.
 */
enum GabmStatus gabm_sim_run(struct GabmSim *sim);

/**
 * Number of completed days, or -1 for a null handle.
 *
 * # Safety
 * `sim` must be NULL or a live handle from this library.
 */
int32_t gabm_sim_day(const struct GabmSim *sim);

/**
 * Per-day metrics as a JSON array (fields: day, new_cases, mobility_count,
 * infected, susceptible, recovered, total_contacts).
 *
 * # Safety
 * `sim` must be a live handle; `out_json` must be valid. The returned
 * string is owned by the caller.
 */
enum GabmStatus gabm_sim_metrics_json(const struct GabmSim *sim, char **out_json);

/**
 * Run summary as a JSON object: population, days_run, early_stopped,
 * cumulative_cases, average_mobility, largest_peak, epidemic_duration,
 * duration_censored.
 *
 * # Safety
 * `sim` must be a live handle; `out_json` must be valid. The returned
 * string is owned by the caller.
 */
enum GabmStatus gabm_sim_summary_json(const struct GabmSim *sim, char **out_json);

/**
 * Save the current world to a checkpoint file.
 *
 * # Safety
 * `sim` must be a live handle; `path` a valid NUL-terminated string.
 */
enum GabmStatus gabm_sim_save_checkpoint(const struct GabmSim *sim, const char *path);

/**
 * Release a simulation handle. NULL is allowed.
 *
 * # Safety
 * `sim` must be NULL or a handle from this library, not yet freed.
 */
void gabm_sim_free(struct GabmSim *sim);

/**
 * Release a string returned by this library. NULL is allowed.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void gabm_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GABM_H */
