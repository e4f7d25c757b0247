/* C interface of the avor risk engine. All functions are thread-safe on distinct handles.
 * Strings returned through char** are owned by the caller and released with avor_string_free.
 * On failure a function returns a non-zero status and avor_last_error() describes it
 * (per thread, valid until the next call on that thread). */
#ifndef AVOR_AVOR_H
#define AVOR_AVOR_H

#include <stddef.h>

#if defined(AVOR_BUILDING_LIBRARY)
#define AVOR_API __attribute__((visibility("default")))
#else
#define AVOR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum avor_status
{
  AVOR_OK = 0,
  AVOR_E_PARSE = 1,
  AVOR_E_FORMAT = 2,
  AVOR_E_REFERENCE = 3,
  AVOR_E_VALIDATION = 4,
  AVOR_E_IO = 5,
  AVOR_E_NO_CUTIN = 6,
  AVOR_E_DEGENERATE = 7,
  AVOR_E_SPEC_MISMATCH = 8,
  AVOR_E_OUT_OF_RANGE = 9,
  AVOR_E_INVALID_ARGUMENT = 10,
  AVOR_E_NOT_FOUND = 11,
  AVOR_E_CONFLICT = 12,
  AVOR_E_INTERNAL = 99
} avor_status;

enum
{
  AVOR_MODEL_DRF = 1,
  AVOR_MODEL_AVOR = 2
};

typedef struct avor_config avor_config;
typedef struct avor_scenario avor_scenario;
typedef struct avor_risk_result avor_risk_result;
typedef struct avor_session_store avor_session_store;

typedef struct avor_phases
{
  double t_phase0_start;
  double t_I_start;
  double t_II_start;
  double t_III_start;
  double t_III_end;
} avor_phases;

typedef struct avor_cutin_stats
{
  double duration;
  double v_lat_avg;
  double v_lat_max;
  double a_lat_avg;
  double initial_cutin_distance;
} avor_cutin_stats;

AVOR_API const char * avor_version(void);
AVOR_API const char * avor_last_error(void);
/* Stable snake_case name of a status, e.g. "validation_error". */
AVOR_API const char * avor_status_name(avor_status status);
AVOR_API void avor_string_free(char * s);

/* Configuration. Defaults apply to every key not set. */
AVOR_API avor_status avor_config_new(avor_config ** out);
AVOR_API avor_status avor_config_load(const char * path, avor_config ** out);
/* key is "section.key", e.g. "grid.res". */
AVOR_API avor_status avor_config_set(avor_config * config, const char * key, const char * value);
/* Applies AVOR_<SECTION>_<KEY> environment variables. */
AVOR_API avor_status avor_config_apply_env(avor_config * config);
AVOR_API avor_status avor_config_to_text(const avor_config * config, char ** out);
AVOR_API void avor_config_free(avor_config * config);

/* Scenarios. config may be NULL for defaults. */
AVOR_API avor_status avor_scenario_load(const char * path, const avor_config * config, avor_scenario ** out);
AVOR_API avor_status avor_scenario_parse(const char * json, size_t length, const avor_config * config,
                                         avor_scenario ** out);
AVOR_API void avor_scenario_free(avor_scenario * scenario);
/* {id, dt, frames, duration, population, risk_label, populations[]} */
AVOR_API avor_status avor_scenario_info_json(const avor_scenario * scenario, char ** out);
/* population: "O", "A" or "A+R". */
AVOR_API avor_status avor_scenario_frames_json(const avor_scenario * scenario, const char * population, char ** out);

AVOR_API avor_status avor_segment_phases(const avor_scenario * scenario, const avor_config * config,
                                         avor_phases * out);
/* phases may be NULL. */
AVOR_API avor_status avor_characterize(const avor_scenario * scenario, const avor_config * config,
                                       avor_phases * phases, avor_cutin_stats * out);

/* Risk traces. models is a mask of AVOR_MODEL_*; population NULL keeps the scenario's level. */
AVOR_API avor_status avor_run(const avor_scenario * scenario, const avor_config * config, unsigned models,
                              const char * population, avor_risk_result ** out);
AVOR_API size_t avor_risk_frame_count(const avor_risk_result * result);
/* Borrowed pointer into the result, valid until avor_risk_free. */
AVOR_API avor_status avor_risk_values(const avor_risk_result * result, unsigned model, const double ** values,
                                      size_t * count);
/* Columns t, model, raw, normalized, phase. */
AVOR_API avor_status avor_risk_csv(const avor_risk_result * result, char ** out);
AVOR_API avor_status avor_risk_write_csv(const avor_risk_result * result, const char * path);
AVOR_API avor_status avor_risk_summary_json(const avor_risk_result * result, char ** out);
AVOR_API avor_status avor_risk_json(const avor_risk_result * result, char ** out);
AVOR_API void avor_risk_free(avor_risk_result * result);

/* RMSE table (CSV) and onset summary (JSON) for the given scenarios against every rating file
 * in ratings_dir. */
AVOR_API avor_status avor_evaluate(const char * const * scenario_paths, size_t count, const char * ratings_dir,
                                   const avor_config * config, char ** rmse_csv, char ** onset_json);

/* Rating sessions persisted under <data_dir>/ratings. */
AVOR_API avor_status avor_sessions_open(const char * data_dir, avor_session_store ** out);
AVOR_API void avor_sessions_free(avor_session_store * store);
/* Returns {session_id, rater_id, scenario_id, population, started_at, completed}. */
AVOR_API avor_status avor_session_create(avor_session_store * store, const char * rater_id,
                                         const char * scenario_id, const char * population, char ** out);
/* body: {"samples": [{"t": .., "srr": ..}, ...]}. Returns the session record with the stored
 * sample count and file name. */
AVOR_API avor_status avor_session_submit(avor_session_store * store, const char * session_id, const char * body,
                                         char ** out);
/* JSON array of stored ratings; scenario_id may be NULL for all. */
AVOR_API avor_status avor_ratings_json(avor_session_store * store, const char * scenario_id, char ** out);

#ifdef __cplusplus
}
#endif

#endif
