#ifndef ARXTRAIL_ARXTRAIL_H
#define ARXTRAIL_ARXTRAIL_H

#include <stddef.h>
#include <stdint.h>

#if defined(ARXT_BUILDING_LIBRARY)
#define ARXT_API __attribute__((visibility("default")))
#else
#define ARXT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum arxt_status {
  ARXT_OK = 0,
  ARXT_E_INVALID_ARGUMENT = 1,
  ARXT_E_WIDTH_MISMATCH = 2,
  ARXT_E_INVALID_DIFFERENTIAL = 3,
  ARXT_E_PARSE = 4,
  ARXT_E_LIMIT_EXCEEDED = 5,
  ARXT_E_SOLVER_MISSING = 6,
  ARXT_E_SOLVER_TIMEOUT = 7,
  ARXT_E_SOLVER_FAILED = 8,
  ARXT_E_IO = 9,
  ARXT_E_INTERNAL = 10
} arxt_status;

/* Opaque handles. */
typedef struct arxt_context arxt_context;
typedef struct arxt_trail arxt_trail;

/* Receives one JSON object per search probe. */
typedef void (*arxt_log_fn)(const char* json_line, void* user);

ARXT_API const char* arxt_version(void);
ARXT_API const char* arxt_status_name(arxt_status s);

/* Context: solver configuration plus the last error message. config_path may
   be NULL (environment variables still apply). */
ARXT_API arxt_status arxt_context_new(const char* config_path, arxt_context** out);
ARXT_API void arxt_context_free(arxt_context* ctx);
ARXT_API const char* arxt_last_error(const arxt_context* ctx);
/* Keys: "sat", "sat_flags", "counter", "counter_flags", "jobs",
   "enum_limit_bits", "timeout_s", "probe_timeout_s". */
ARXT_API arxt_status arxt_context_set(arxt_context* ctx, const char* key, const char* value);
ARXT_API arxt_status arxt_context_config_json(arxt_context* ctx, char** out_json);
ARXT_API void arxt_context_set_log(arxt_context* ctx, arxt_log_fn fn, void* user);

/* Strings returned through char** are owned by the caller. */
ARXT_API void arxt_string_free(char* s);

/* Single addition. Differences are hex ("0x..") or binary ("0b..") text. */
ARXT_API arxt_status arxt_xdp(arxt_context* ctx, unsigned n, const char* dx, const char* dy, const char* dz, int* valid,
                              unsigned* weight);
ARXT_API arxt_status arxt_xdp_report(arxt_context* ctx, unsigned n, const char* dx, const char* dy, const char* dz,
                                     char** out_json);
/* CSV "z,frequency" of the output distribution; n <= 12. */
ARXT_API arxt_status arxt_hist_csv(arxt_context* ctx, unsigned n, const char* dx, const char* dy, const char* dz,
                                   char** out_csv);

/* CMA files (JSON text). method: 0 auto, 1 carry DP, 2 CNF counting. */
ARXT_API arxt_status arxt_cma(arxt_context* ctx, const char* spec_json, int with_probability, int method,
                              char** out_json);
ARXT_API arxt_status arxt_conflict(arxt_context* ctx, const char* spec_json, char** out_json);

/* Trails. */
ARXT_API arxt_status arxt_trail_load(arxt_context* ctx, const char* path, arxt_trail** out);
ARXT_API arxt_status arxt_trail_parse(arxt_context* ctx, const char* json, arxt_trail** out);
ARXT_API void arxt_trail_free(arxt_trail* t);
ARXT_API unsigned arxt_trail_rounds(const arxt_trail* t);
ARXT_API arxt_status arxt_trail_json(arxt_context* ctx, const arxt_trail* t, char** out_json);
/* Checks stored weight columns against recomputed ones. */
ARXT_API arxt_status arxt_trail_check(arxt_context* ctx, const arxt_trail* t, char** out_json);

/* Verdict JSON; refine = 0 skips probability refinement. */
ARXT_API arxt_status arxt_verify(arxt_context* ctx, const arxt_trail* t, int refine, char** out_json);

/* Search options JSON: {"cipher", "rounds", "mode": "optimal"|"good",
   "w_start", "w_max", "matsui": bool, "prefix": bool, "suffix": bool,
   "bounds": [..], "pins": ["k.8=0x..", ..], "wd": [hi, lo], "wdk": [hi, lo],
   "zero_window": int, "verify": bool, "refine": bool} */
ARXT_API arxt_status arxt_search(arxt_context* ctx, const char* options_json, char** out_json);

/* Toy experiment: independence, refined and empirical weights per round.
   samples = 0 requests a full traversal. */
ARXT_API arxt_status arxt_toy(arxt_context* ctx, const arxt_trail* t, uint64_t samples, uint64_t seed, char** out_json);

/* DIMACS of a model. Request JSON: {"model": "cma", "spec": {...}, "pruned": bool}
   | {"model": "trail", "trail": {...}} | {"model": "search", "cipher", "rounds", "W", "pins"}
   | {"model": "xdp", "n", "dx", "dy", "dz"} */
ARXT_API arxt_status arxt_export_cnf(arxt_context* ctx, const char* request_json, char** out_dimacs);

#ifdef __cplusplus
}
#endif

#endif
