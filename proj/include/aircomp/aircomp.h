/* C interface to the AirCompSim simulator. All functions return
 * AIRCOMP_OK (0) or a negative error code; details of the last failure on
 * the calling thread are available through aircomp_last_error(). */
#ifndef AIRCOMP_H
#define AIRCOMP_H

#include <stddef.h>
#include <stdint.h>

#if defined(AIRCOMP_BUILDING_LIBRARY)
#define AIRCOMP_API __attribute__((visibility("default")))
#else
#define AIRCOMP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aircomp_status {
  AIRCOMP_OK = 0,
  AIRCOMP_E_INVALID_ARGUMENT = -1,
  AIRCOMP_E_PARSE = -2,
  AIRCOMP_E_VALIDATION = -3,
  AIRCOMP_E_SCHEDULING_IN_PAST = -4,
  AIRCOMP_E_OUT_OF_BOUNDS = -5,
  AIRCOMP_E_SERVER_DOWN = -6,
  AIRCOMP_E_INVALID_TRANSITION = -7,
  AIRCOMP_E_INVALID_ACTION = -8,
  AIRCOMP_E_MISSING_COLUMN = -9,
  AIRCOMP_E_IO = -10,
  AIRCOMP_E_VERIFY_MISMATCH = -11,
  AIRCOMP_E_INTERNAL = -100
} aircomp_status;

typedef struct aircomp_scenario aircomp_scenario_t;
typedef struct aircomp_results aircomp_results_t;

/* Policy hook. Receives one observation JSON object per decision point and
 * returns an action JSON object, or NULL / "null" to keep the default. The
 * returned string must stay valid until the next call on the same hook. */
typedef const char* (*aircomp_act_fn)(const char* observation_json, void* user_data);
typedef void (*aircomp_reward_fn)(const char* reward_json, void* user_data);

typedef struct aircomp_run_options {
  const char* event_log_dir; /* NULL: no event logs */
  const char* records_dir;   /* NULL: no raw task/server records */
  unsigned threads;          /* 0: hardware concurrency */
  aircomp_act_fn act;        /* NULL: built-in policies only */
  aircomp_reward_fn reward;
  void* user_data;
  int hook_stdio; /* nonzero: drive the hook over stdin/stdout lines */
} aircomp_run_options;

AIRCOMP_API void aircomp_run_options_init(aircomp_run_options* options);

AIRCOMP_API int aircomp_scenario_load_file(const char* path, aircomp_scenario_t** out);
AIRCOMP_API int aircomp_scenario_load_text(const char* text, aircomp_scenario_t** out);
AIRCOMP_API void aircomp_scenario_destroy(aircomp_scenario_t* scenario);
AIRCOMP_API int aircomp_scenario_set_seed(aircomp_scenario_t* scenario, uint64_t root_seed);
AIRCOMP_API int aircomp_scenario_set_repeats(aircomp_scenario_t* scenario, int repeats);
/* Number of configurations the sweep expands to. */
AIRCOMP_API int aircomp_scenario_config_count(const aircomp_scenario_t* scenario, size_t* out);

/* Runs the base configuration only. */
AIRCOMP_API int aircomp_run(const aircomp_scenario_t* scenario, const aircomp_run_options* options,
                            aircomp_results_t** out);
/* Runs every configuration of the scenario's sweep. */
AIRCOMP_API int aircomp_sweep(const aircomp_scenario_t* scenario, const aircomp_run_options* options,
                              aircomp_results_t** out);

AIRCOMP_API int aircomp_results_write_csv(const aircomp_results_t* results, const char* path);
AIRCOMP_API int aircomp_results_row_count(const aircomp_results_t* results, size_t* out);
/* Mean of a CSV column for one row. Sets *present to 0 for blank cells. */
AIRCOMP_API int aircomp_results_get(const aircomp_results_t* results, size_t row, const char* column,
                                    double* value, int* present);
AIRCOMP_API int aircomp_results_position_violations(const aircomp_results_t* results, uint64_t* out);
AIRCOMP_API int aircomp_results_invalid_actions(const aircomp_results_t* results, uint64_t* out);
AIRCOMP_API void aircomp_results_destroy(aircomp_results_t* results);

/* Writes the result figures as SVG into out_dir. */
AIRCOMP_API int aircomp_plot(const char* csv_path, const char* out_dir);
/* Recomputes a metrics CSV from the raw records next to it.
 * Returns AIRCOMP_E_VERIFY_MISMATCH when any cell disagrees. */
AIRCOMP_API int aircomp_verify(const char* csv_path, size_t* rows_checked, size_t* tasks_checked);

AIRCOMP_API const char* aircomp_last_error(void);
AIRCOMP_API const char* aircomp_status_name(int status);
AIRCOMP_API const char* aircomp_version(void);

#ifdef __cplusplus
}
#endif

#endif
