#ifndef THINTAILS_H
#define THINTAILS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TtStatus {
  TT_STATUS_OK = 0,
  TT_STATUS_NULL_POINTER = 1,
  TT_STATUS_DOMAIN = 2,
  TT_STATUS_PARSE = 3,
  TT_STATUS_UNSUPPORTED = 4,
  TT_STATUS_NUMERIC = 5,
  TT_STATUS_INVALID_UTF8 = 6,
  TT_STATUS_PANIC = 7,
} TtStatus;

/**
 * Response curve handle.
 */
typedef struct TtCurve TtCurve;

/**
 * Student-t source handle.
 */
typedef struct TtStudentT TtStudentT;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *tt_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tt_version(void);

/**
 * Parses `sigmoid:kl=<r>;a=<r>,b=<r>,c=<r>[;...]`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum TtStatus tt_curve_parse(const char *spec, struct TtCurve **out);

/**
 * # Safety
 * `curve` must come from [`tt_curve_parse`] and not be used afterwards.
 */
void tt_curve_free(struct TtCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum TtStatus tt_curve_eval(const struct TtCurve *curve, double x, double *out);

/**
 * First (`order` 1) or second (`order` 2) derivative.
 *
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum TtStatus tt_curve_derivative(const struct TtCurve *curve,
                                  double x,
                                  uint32_t order,
                                  double *out);

/**
 * Inverse of a single-term curve.
 *
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum TtStatus tt_curve_inverse(const struct TtCurve *curve, double y, double *out);

/**
 * Closed range of values the curve attains over the real line.
 *
 * # Safety
 * `curve` must be a live handle; `lo` and `hi` must be writable.
 */
enum TtStatus tt_curve_attained_range(const struct TtCurve *curve, double *lo, double *hi);

/**
 * # Safety
 * `out` must be writable.
 */
enum TtStatus tt_student_new(double sigma, double alpha, struct TtStudentT **out);

/**
 * # Safety
 * `dist` must come from [`tt_student_new`] and not be used afterwards.
 */
void tt_student_free(struct TtStudentT *dist);

/**
 * # Safety
 * `dist` must be a live handle; `out` must be writable.
 */
enum TtStatus tt_student_pdf(const struct TtStudentT *dist, double x, double *out);

/**
 * # Safety
 * `dist` must be a live handle; `out` must be writable.
 */
enum TtStatus tt_student_cdf(const struct TtStudentT *dist, double x, double *out);

/**
 * # Safety
 * `dist` must be a live handle; `out` must be writable.
 */
enum TtStatus tt_student_quantile(const struct TtStudentT *dist, double p, double *out);

/**
 * Writes `n` draws into `buf`. The same seed gives the same values.
 *
 * # Safety
 * `dist` must be a live handle; `buf` must hold `n` doubles.
 */
enum TtStatus tt_student_sample(const struct TtStudentT *dist,
                                uint64_t seed,
                                uintptr_t n,
                                double *buf);

/**
 * Density of the pushed-forward law at `y` (single-term curves).
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum TtStatus tt_inherited_pdf(const struct TtCurve *curve,
                               const struct TtStudentT *dist,
                               double y,
                               double *out);

/**
 * Kurtosis of the pushed-forward law by quadrature.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum TtStatus tt_inherited_kurtosis(const struct TtCurve *curve,
                                    const struct TtStudentT *dist,
                                    double *out);

/**
 * Writes `n` draws of the pushed-forward law into `buf`.
 *
 * # Safety
 * Handles must be live; `buf` must hold `n` doubles.
 */
enum TtStatus tt_inherited_sample(const struct TtCurve *curve,
                                  const struct TtStudentT *dist,
                                  uint64_t seed,
                                  uintptr_t n,
                                  double *buf);

/**
 * Monotone map carrying `dist` onto the Gaussian with mean `m` and sd `s`.
 *
 * # Safety
 * `dist` must be a live handle; `out` must be writable.
 */
enum TtStatus tt_gamma_map(const struct TtStudentT *dist,
                           double m,
                           double s,
                           double x,
                           double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum TtStatus tt_erfc(double x, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum TtStatus tt_erfc_inv(double p, double *out);

/**
 * Euler beta function.
 *
 * # Safety
 * `out` must be writable.
 */
enum TtStatus tt_beta(double a, double b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THINTAILS_H */
