#ifndef TRACTLAB_H
#define TRACTLAB_H

/* C interface to the tractlab library. Objects are opaque handles; every
 * fallible call returns a tl_status and leaves a thread-local message that
 * tl_last_error() reports until the next failing call on the same thread. */

#include <stddef.h>

#if defined(TRACTLAB_BUILDING)
#define TL_API __attribute__((visibility("default")))
#else
#define TL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
  TL_OK = 0,
  TL_ERR_PARAM = 1,
  TL_ERR_DOMAIN = 2,
  TL_ERR_OVERFLOW = 3,
  TL_ERR_CONTINUATION = 4,
  TL_ERR_IO = 5,
  TL_ERR_INTERNAL = 6
} tl_status;

typedef enum tl_verdict { TL_VERDICT_NONE = 0, TL_VERDICT_PASS = 1, TL_VERDICT_FAIL = 2 } tl_verdict;

typedef struct tl_complex {
  double re;
  double im;
} tl_complex;

typedef struct tl_spec tl_spec;
typedef struct tl_schroeder tl_schroeder;
typedef struct tl_tracts tl_tracts;
typedef struct tl_report tl_report;

TL_API const char* tl_version(void);
TL_API const char* tl_last_error(void);
TL_API const char* tl_status_name(tl_status status);

/* Function catalog. Text forms: exp[:lambda], sin[:alpha[:beta]], ml:alpha,
 * mlpow:alpha:N, smlpow:lambda:alpha:N, erdos:P:Q[:c]. */
TL_API tl_status tl_spec_parse(const char* text, tl_spec** out);
TL_API void tl_spec_free(tl_spec* spec);
/* Copies the canonical text form into buf (always NUL-terminated when size > 0)
 * and stores the full length in *needed. */
TL_API tl_status tl_spec_text(const tl_spec* spec, char* buf, size_t size, size_t* needed);

/* On overflow the value is not set, *overflow is 1 and *log_value still holds
 * log f(z). Either output pointer may be NULL. */
TL_API tl_status tl_eval(const tl_spec* spec, tl_complex z, tl_complex* value, tl_complex* log_value,
                         int* overflow);
TL_API tl_status tl_log_modulus(const tl_spec* spec, tl_complex z, double* value, int* overflow_safe);
/* log log M(r, f). */
TL_API tl_status tl_max_modulus(const tl_spec* spec, double r, int samples, double* out);
TL_API tl_status tl_order_estimate(const tl_spec* spec, double r_min, double r_max, int n_points,
                                   double* out);

/* Schroeder linearizer of exp(beta x). */
TL_API tl_status tl_schroeder_create(double beta, tl_schroeder** out);
TL_API void tl_schroeder_free(tl_schroeder* sol);
TL_API tl_status tl_schroeder_fixed_point(const tl_schroeder* sol, double* xi, double* mu);
TL_API tl_status tl_schroeder_phi(const tl_schroeder* sol, double x, double* out);
TL_API tl_status tl_schroeder_epsilon(const tl_schroeder* sol, double x, double* out);

/* Tract decomposition of {|f| > R} on the annulus r_min < |z| < r_max. */
TL_API tl_status tl_tracts_decompose(const tl_spec* spec, double R, double r_min, double r_max, int n_theta,
                                     int rings_per_decade, tl_tracts** out);
TL_API void tl_tracts_free(tl_tracts* dec);
TL_API tl_status tl_tracts_count(const tl_tracts* dec, int* n_tracts, int* n_islands);

/* Runs a named experiment. config_json is a flat JSON object of scalar
 * values. Checked failures still return TL_OK with verdict TL_VERDICT_FAIL. */
TL_API tl_status tl_run(const char* command, const char* config_json, tl_report** out);
TL_API void tl_report_free(tl_report* report);
TL_API tl_verdict tl_report_verdict(const tl_report* report);
TL_API const char* tl_report_json(const tl_report* report);
TL_API size_t tl_report_file_count(const tl_report* report);
TL_API const char* tl_report_file_name(const tl_report* report, size_t index);
/* Contents may contain NUL bytes (PGM rasters); use the size. */
TL_API const char* tl_report_file_data(const tl_report* report, size_t index, size_t* size);

/* Space-separated list of experiment names. */
TL_API const char* tl_commands(void);

#ifdef __cplusplus
}
#endif

#endif
