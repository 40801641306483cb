#ifndef STABLELIKE_H
#define STABLELIKE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define SL_API __attribute__((visibility("default")))
#else
#define SL_API
#endif

/* Status codes. The nonzero values double as CLI exit codes. */
typedef enum sl_status {
  SL_OK = 0,
  SL_ERR_OTHER = 1,
  SL_ERR_CONFIG = 2,
  SL_ERR_NUMERICAL = 3,
  SL_ERR_PRECONDITION = 4,
  SL_ERR_NULL_ARGUMENT = 5
} sl_status;

typedef struct sl_spec sl_spec;
typedef struct sl_rng sl_rng;

/* Identifier of this build (git describe style). Static storage. */
SL_API const char* sl_build_id(void);

/* Last error on the calling thread as a JSON object, or "" if the last call
 * succeeded. Valid until the next sl_* call on this thread. */
SL_API const char* sl_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
SL_API void sl_string_free(char* s);

/* ---- random streams */
SL_API sl_status sl_rng_new(uint64_t seed, sl_rng** out);
/* Child stream `index`; does not advance the parent. */
SL_API sl_status sl_rng_split(const sl_rng* parent, uint64_t index, sl_rng** out);
SL_API void sl_rng_free(sl_rng* rng);

/* ---- symmetric alpha-stable law, cf exp(-gamma |xi|^alpha) */
SL_API sl_status sl_stable_pdf(double alpha, double gamma, double y, double* out);
SL_API sl_status sl_stable_cdf(double alpha, double gamma, double y, double* out);
SL_API sl_status sl_stable_tail_constant(double alpha, double gamma, double* out);
SL_API sl_status sl_stable_sample(double alpha, double gamma, sl_rng* rng, double* out, size_t n);

/* ---- chain specifications, from the JSON spec format (docs/formats.md) */
SL_API sl_status sl_spec_from_json(const char* json, sl_spec** out);
SL_API sl_status sl_spec_to_json(const sl_spec* spec, char** out);
SL_API void sl_spec_free(sl_spec* spec);

SL_API sl_status sl_transition_sample(const sl_spec* spec, double x, sl_rng* rng, double* out);
/* Continuous-state specs only. */
SL_API sl_status sl_transition_density(const sl_spec* spec, double x, double y, double* out);
/* n steps from x0; states must hold n + 1 values. */
SL_API sl_status sl_run_chain(const sl_spec* spec, double x0, size_t n, sl_rng* rng, double* states);

/* Recurrence classifier. classifier_json may be NULL for the defaults; the
 * result is the classifier report as JSON. */
SL_API sl_status sl_classify(const sl_spec* spec, const char* classifier_json, uint64_t seed,
                             int threads, char** report_json);

/* Runs a whole experiment config (the CLI config format) and writes its
 * output files. Overrides: seed if has_seed, threads if > 0, out_dir if not
 * NULL. On success *report_json (if not NULL) receives report.json. */
SL_API sl_status sl_run_experiment(const char* config_json, int has_seed, uint64_t seed,
                                   int threads, const char* out_dir, char** report_json);
/* Same, reading the config from a file. */
SL_API sl_status sl_run_config_file(const char* path, int has_seed, uint64_t seed, int threads,
                                    const char* out_dir, char** report_json);

#ifdef __cplusplus
}
#endif

#endif
