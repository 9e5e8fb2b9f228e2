#ifndef QPS_H
#define QPS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define QPS_API __declspec(dllexport)
#else
#define QPS_API __attribute__((visibility("default")))
#endif

/* Every call returning int returns one of these. */
enum qps_status {
  QPS_OK = 0,
  QPS_INVALID_ARGUMENT = 1,
  QPS_CONFIG = 2,
  QPS_CUTOFF = 3,
  QPS_ALIASING = 4,
  QPS_SINGULAR = 5,
  QPS_NOT_CONVERGED = 6,
  QPS_IO = 7,
  QPS_ASSUMPTION = 8,
  QPS_CHECK_FAILED = 9,
  QPS_INTERNAL = 10
};

typedef struct qps_scenario qps_scenario;
typedef struct qps_solution qps_solution;

QPS_API const char* qps_version(void);
/* Message of the last failing call on this thread; "" when none. */
QPS_API const char* qps_last_error(void);
/* "ok", "config", "cutoff", ... */
QPS_API const char* qps_status_name(int status);

QPS_API int qps_builtin_count(void);
QPS_API const char* qps_builtin_name(int index);

/* Documented config keys; fields may be NULL. Returns QPS_INVALID_ARGUMENT past the end. */
QPS_API int qps_config_key_count(void);
QPS_API int qps_config_key(int index, const char** key, const char** unit, const char** help);

QPS_API int qps_scenario_builtin(const char* name, qps_scenario** out);
QPS_API int qps_scenario_load(const char* path, qps_scenario** out);
QPS_API int qps_scenario_parse(const char* text, qps_scenario** out);
QPS_API int qps_scenario_set(qps_scenario* s, const char* key, const char* value);
/* Copies the value (NUL terminated) into buf when it fits; *needed gets the full length plus one. */
QPS_API int qps_scenario_get(const qps_scenario* s, const char* key, char* buf, size_t len, size_t* needed);
/* Config text; release with qps_string_free. */
QPS_API int qps_scenario_serialize(const qps_scenario* s, char** out);
QPS_API void qps_scenario_free(qps_scenario* s);
QPS_API void qps_string_free(char* p);

/* Progress lines from runs and checks. Pass NULL to silence. */
typedef void (*qps_log_fn)(const char* line, void* user);
QPS_API void qps_set_log(qps_log_fn fn, void* user);

/* Full run into output_dir. With check != 0 the scenario's acceptance suite runs too and a failure
   there returns QPS_CHECK_FAILED. failed_criteria may be NULL. */
QPS_API int qps_run(const qps_scenario* s, const char* output_dir, int check, int* failed_criteria);
/* Comma separated ids such as "A1,A5"; NULL or "" runs all of them. */
QPS_API int qps_check(const char* ids, const char* output_dir, int threads, int* failed_criteria);

/* In-memory solve (cell or strip as the scenario says). */
QPS_API int qps_solve(const qps_scenario* s, qps_solution** out);
/* E at x = (x1, x2, x3) with x3 >= height, as six doubles (re, im per component). */
QPS_API int qps_solution_extend(const qps_solution* u, const double x[3], double out[6]);
/* Weighted norm for strip solves, coefficient norm for cell solves. */
QPS_API int qps_solution_norm(const qps_solution* u, double* out);
QPS_API void qps_solution_free(qps_solution* u);

#ifdef __cplusplus
}
#endif

#endif
