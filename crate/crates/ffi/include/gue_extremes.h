#ifndef GUE_EXTREMES_H
#define GUE_EXTREMES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Ensemble selector for the sampling functions.
 */
#define GUE_ENSEMBLE_GUE 0

#define GUE_ENSEMBLE_UNIFORM 1

/**
 * Status codes.
 */
typedef enum GueStatus {
  GUE_STATUS_OK = 0,
  GUE_STATUS_DOMAIN_ERROR = 1,
  GUE_STATUS_RANGE_ERROR = 2,
  GUE_STATUS_SINGULAR_ERROR = 3,
  GUE_STATUS_IO_ERROR = 4,
  GUE_STATUS_NULL_POINTER = 5,
  GUE_STATUS_INVALID_ARGUMENT = 6,
  GUE_STATUS_PANIC = 7,
} GueStatus;

/**
 * Sequential sampler of extreme eigenvalue pairs.
 */
typedef struct GueSampler GueSampler;

/**
 * Tabulated `F2` and `F2'`.
 */
typedef struct GueTable GueTable;

/**
 * Joint law `P(λ̃min ≤ x, λ̃max ≤ y)` with its product and correction.
 */
typedef struct GueJointCdf {
  size_t n;
  double x;
  double y;
  double joint;
  double product;
  double correction_predictor;
} GueJointCdf;

typedef struct GueCorrelation {
  size_t n;
  double rho_det;
  double rho_asym;
} GueCorrelation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 */
const char *gue_last_error_message(void);

/**
 * `Ai(x)` and `Ai'(x)`.
 *
 * # Safety
 * `ai` and `ai_prime` must be valid for writes.
 */
enum GueStatus gue_airy(double x, double *ai, double *ai_prime);

/**
 * Tracy–Widom CDF `F2(t)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GueStatus gue_tw_cdf(double t, double tol, double *out);

/**
 * Tracy–Widom density `F2'(t)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GueStatus gue_tw_pdf(double t, double tol, double *out);

/**
 * `u(t) = F2'(t)/F2(t)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GueStatus gue_u_function(double t, double tol, double *out);

/**
 * Tracy–Widom mean and variance.
 *
 * # Safety
 * `mean` and `variance` must be valid for writes.
 */
enum GueStatus gue_tw_moments(double tol, double *mean, double *variance);

/**
 * `P(λ̃max ≤ y)` at size `n`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GueStatus gue_marginal_max_cdf(size_t n, double y, double tol, double *out);

/**
 * `P(-λ̃min ≤ x)` at size `n`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GueStatus gue_marginal_min_cdf(size_t n, double x, double tol, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum GueStatus gue_joint_cdf(size_t n, double x, double y, double tol, struct GueJointCdf *out);

/**
 * Determinant correlation of the extreme eigenvalues and its asymptote.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GueStatus gue_correlation_extremes(size_t n, double tol, struct GueCorrelation *out);

/**
 * Monte Carlo sample correlation.
 *
 * # Safety
 * `rho` and `stderr` must be valid for writes.
 */
enum GueStatus gue_sample_correlation(uint32_t ensemble_kind,
                                      size_t n,
                                      size_t samples,
                                      uint64_t seed,
                                      double *rho,
                                      double *stderr);

/**
 * # Safety
 * `out` must be valid for writes. The handle is released with
 * [`gue_sampler_free`].
 */
enum GueStatus gue_sampler_new(uint32_t ensemble_kind,
                               size_t n,
                               uint64_t seed,
                               struct GueSampler **out);

/**
 * Draws the next pair; sample `i` matches sample `i` of
 * [`gue_sample_correlation`] with the same seed.
 *
 * # Safety
 * `sampler` must come from [`gue_sampler_new`]; outputs must be valid.
 */
enum GueStatus gue_sampler_next(struct GueSampler *sampler, double *lam_min, double *lam_max);

/**
 * # Safety
 * `sampler` must come from [`gue_sampler_new`] or be null.
 */
void gue_sampler_free(struct GueSampler *sampler);

/**
 * # Safety
 * `out` must be valid for writes. The handle is released with
 * [`gue_table_free`].
 */
enum GueStatus gue_tw_table_new(double lo,
                                double hi,
                                double step,
                                double tol,
                                struct GueTable **out);

/**
 * Number of rows; 0 for a null handle.
 *
 * # Safety
 * `table` must come from [`gue_tw_table_new`] or be null.
 */
size_t gue_table_len(const struct GueTable *table);

/**
 * # Safety
 * `table` must come from [`gue_tw_table_new`]; outputs must be valid.
 */
enum GueStatus gue_table_row(const struct GueTable *table,
                             size_t index,
                             double *t,
                             double *cdf,
                             double *pdf);

/**
 * # Safety
 * `table` must come from [`gue_tw_table_new`] or be null.
 */
void gue_table_free(struct GueTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GUE_EXTREMES_H */
