/*
 * reluspan C API.
 *
 * Every object lives behind an opaque handle created by a *_create / *_from_*
 * function and released with the matching *_free. Functions return an
 * rs_status; on failure rs_last_error() describes the problem (thread-local,
 * valid until the next failing call on the same thread). Strings returned
 * through char** are heap-allocated and released with rs_string_free.
 */
#ifndef RELUSPAN_RELUSPAN_H
#define RELUSPAN_RELUSPAN_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(RELUSPAN_BUILDING)
#    define RS_API __declspec(dllexport)
#  else
#    define RS_API __declspec(dllimport)
#  endif
#else
#  define RS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rs_status {
  RS_OK = 0,
  RS_ERR_INVALID_ARGUMENT = 1,
  RS_ERR_PARSE = 2,
  RS_ERR_DOMAIN = 3,
  RS_ERR_NOT_IN_Y = 4,
  RS_ERR_FORMAT = 5,
  RS_ERR_INTERNAL = 6
} rs_status;

typedef enum rs_point_kind {
  RS_MINUS_INFINITY = -1,
  RS_FINITE = 0,
  RS_PLUS_INFINITY = 1
} rs_point_kind;

typedef enum rs_norm_method { RS_NORM_EXACT_PL = 0, RS_NORM_GRID_ORACLE = 1 } rs_norm_method;

typedef struct rs_network rs_network;
typedef struct rs_pl rs_pl;
typedef struct rs_target rs_target;
typedef struct rs_certificate rs_certificate;
typedef struct rs_measure rs_measure;

typedef struct rs_norm_report {
  double value;
  rs_point_kind witness_kind;
  double witness_x; /* meaningful for RS_FINITE only */
  rs_norm_method method;
} rs_norm_report;

typedef struct rs_approx_options {
  double tolerance;
  size_t max_knots;
  double initial_radius;
  int oracle_resolution;
} rs_approx_options;

/* ---- library ---------------------------------------------------------- */

RS_API const char* rs_version(void);
RS_API const char* rs_last_error(void);
/* Byte offset of the last parse error, or -1. */
RS_API long rs_last_error_position(void);
RS_API void rs_string_free(char* s);

/* ---- networks ---------------------------------------------------------- */

RS_API rs_status rs_network_create(const double* slopes, const double* offsets,
                                   const double* coefficients, size_t count, rs_network** out);
/* name: "ramp_plus", "ramp_minus", "step_f", "step_g" */
RS_API rs_status rs_network_builtin(const char* name, rs_network** out);
RS_API rs_status rs_network_hat(double center, double halfwidth, rs_network** out);
RS_API rs_status rs_network_add(const rs_network* p, const rs_network* q, rs_network** out);
RS_API rs_status rs_network_scale(const rs_network* p, double s, rs_network** out);
RS_API rs_status rs_network_from_json(const char* text, rs_network** out);
RS_API rs_status rs_network_to_json(const rs_network* net, char** out);
RS_API size_t rs_network_size(const rs_network* net);
RS_API rs_status rs_network_unit(const rs_network* net, size_t index, double* slope,
                                 double* offset, double* coefficient);
RS_API rs_status rs_network_eval(const rs_network* net, double x, double* out);
RS_API void rs_network_free(rs_network* net);

/* ---- piecewise-linear functions ---------------------------------------- */

RS_API rs_status rs_pl_from_json(const char* text, rs_pl** out);
RS_API rs_status rs_pl_to_json(const rs_pl* pl, char** out);
RS_API rs_status rs_pl_eval(const rs_pl* pl, double x, double* out);
RS_API size_t rs_pl_knot_count(const rs_pl* pl);
RS_API rs_status rs_pl_knot(const rs_pl* pl, size_t index, double* x, double* value);
RS_API rs_status rs_pl_tails(const rs_pl* pl, double* m_left, double* m_right, double* c0);
RS_API rs_status rs_network_to_pl(const rs_network* net, rs_pl** out);
/* Canonicalizes the input before converting. */
RS_API rs_status rs_pl_to_network(const rs_pl* pl, rs_network** out);
RS_API void rs_pl_free(rs_pl* pl);

/* 0 = network document, 1 = PL document. */
RS_API rs_status rs_detect_document(const char* text, int* kind);

/* ---- targets ------------------------------------------------------------ */

/* alpha_plus / alpha_minus may be NULL: the limit is then estimated on use. */
RS_API rs_status rs_target_from_expr(const char* expr, const double* alpha_plus,
                                     const double* alpha_minus, rs_target** out);
/* Exact boundary values taken from the network. */
RS_API rs_status rs_target_from_network(const rs_network* net, rs_target** out);
/* Overrides the limit detector: A f is sampled at +-2^k, k in [k_min, k_max]. */
RS_API rs_status rs_target_set_estimation(rs_target* target, int k_min, int k_max,
                                          double threshold);
RS_API rs_status rs_target_eval(const rs_target* target, double x, double* out);
/* side: +1 or -1 */
RS_API rs_status rs_target_alpha(const rs_target* target, int side, double* out);
RS_API void rs_target_free(rs_target* target);

/* ---- weighted norm ------------------------------------------------------ */

RS_API rs_status rs_apply_a_network(const rs_network* net, rs_point_kind kind, double x,
                                    double* out);
RS_API rs_status rs_norm_exact_network(const rs_network* net, rs_norm_report* out);
RS_API rs_status rs_norm_exact_pl(const rs_pl* pl, rs_norm_report* out);
RS_API rs_status rs_norm_grid_network(const rs_network* net, int resolution, rs_norm_report* out);
RS_API rs_status rs_norm_grid_target(const rs_target* target, int resolution,
                                     rs_norm_report* out);
RS_API rs_status rs_norm_report_to_json(const rs_norm_report* report, char** out);
RS_API rs_status rs_linf_bound_check(const rs_network* net, double radius, double* lhs,
                                     double* rhs);

/* ---- approximation ------------------------------------------------------ */

RS_API void rs_approx_options_default(rs_approx_options* options);
/* RS_OK also when the knot budget ran out; check rs_certificate_succeeded. */
RS_API rs_status rs_approximate(const rs_target* target, const rs_approx_options* options,
                                rs_certificate** out);
RS_API int rs_certificate_succeeded(const rs_certificate* cert);
RS_API double rs_certificate_measured_error(const rs_certificate* cert);
RS_API rs_status rs_certificate_network(const rs_certificate* cert, rs_network** out);
RS_API rs_status rs_certificate_to_json(const rs_certificate* cert, char** out);
RS_API void rs_certificate_free(rs_certificate* cert);
RS_API rs_status rs_measure_residual(const rs_target* target, const rs_network* net,
                                     int resolution, double* out);
RS_API rs_status rs_samples_csv(const rs_target* target, const rs_network* net, int resolution,
                                char** out);

/* ---- identities --------------------------------------------------------- */

/* Writes a JSON report of the identity checks; *passed is 1 iff every
 * deviation is at most 1e-12. */
RS_API rs_status rs_verify_identity(double lo, double hi, size_t points, int inject_fault,
                                    int* passed, double* max_deviation, char** report_json);

/* ---- measures ----------------------------------------------------------- */

RS_API rs_status rs_measure_from_json(const char* text, rs_measure** out);
RS_API rs_status rs_measure_pair_network(const rs_measure* mu, const rs_network* net,
                                         double* out);
/* halfwidth <= 0 picks one automatically. */
RS_API rs_status rs_dual_demo(const rs_measure* mu, double tol, double halfwidth,
                              int* annihilates, char** transcript);
/* corrected = 0 uses {step_f, step_g} + hats, otherwise {relu(x), relu(-x)} + hats. */
RS_API rs_status rs_separation_demo(int grid_resolution, int budget, int corrected,
                                    double* residual);
RS_API void rs_measure_free(rs_measure* mu);

#ifdef __cplusplus
}
#endif

#endif /* RELUSPAN_RELUSPAN_H */
