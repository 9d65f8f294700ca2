#ifndef WHEELBKS_H
#define WHEELBKS_H

/* This file is generated by cbindgen from wheelbks-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Uncertainty propagation scheme.
 */
typedef enum {
  WHEELBKS_METHOD_FIRST_ORDER = 0,
  WHEELBKS_METHOD_MONTE_CARLO = 1,
} WheelbksMethod;

/**
 * Result code of every fallible call.
 */
typedef enum {
  WHEELBKS_STATUS_OK = 0,
  /**
   * An argument is out of the supported domain.
   */
  WHEELBKS_STATUS_USAGE_ERROR = 1,
  /**
   * Input data failed to parse or validate.
   */
  WHEELBKS_STATUS_DATA_ERROR = 2,
  /**
   * A numerical procedure failed (singular system, divergence).
   */
  WHEELBKS_STATUS_NUMERICAL_ERROR = 3,
  /**
   * A required pointer was null.
   */
  WHEELBKS_STATUS_NULL_POINTER = 4,
} WheelbksStatus;

/**
 * Opaque handle to a table of measured single-set weak values.
 */
typedef struct WheelbksTable WheelbksTable;

/**
 * Opaque handle to a Wheel observable set.
 */
typedef struct WheelbksWheel WheelbksWheel;

/**
 * A complex estimate with per-component one-sigma uncertainties.
 */
typedef struct {
  double re;
  double re_sigma;
  double im;
  double im_sigma;
} WheelbksEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the most recent failure description on this thread, or null if
 * no call has failed. The caller owns the string and must release it with
 * [`wheelbks_string_free`].
 */
char *wheelbks_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must have been returned by a wheelbks function and not yet freed.
 */
void wheelbks_string_free(char *s);

/**
 * Builds the N-spin Wheel set (odd N >= 3) and stores a handle in `out`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
WheelbksStatus wheelbks_wheel_build(size_t n, WheelbksWheel **out);

/**
 * Releases a wheel handle. Null is ignored.
 *
 * # Safety
 * `wheel` must have come from [`wheelbks_wheel_build`] and not yet be freed.
 */
void wheelbks_wheel_free(WheelbksWheel *wheel);

/**
 * Writes the number of observables and contexts of the set.
 *
 * # Safety
 * All pointers must be valid.
 */
WheelbksStatus wheelbks_wheel_shape(const WheelbksWheel *wheel,
                                    size_t *observables,
                                    size_t *contexts);

/**
 * Multiplies out every context symbolically; `ok` becomes true when all
 * ring products are +identity and all spoke products are -identity.
 *
 * # Safety
 * All pointers must be valid.
 */
WheelbksStatus wheelbks_wheel_verify(const WheelbksWheel *wheel, bool *ok);

/**
 * Runs the GF(2) prover; `inconsistent` becomes true when no
 * noncontextual value assignment satisfies the set.
 *
 * # Safety
 * All pointers must be valid.
 */
WheelbksStatus wheelbks_wheel_nchv_inconsistent(const WheelbksWheel *wheel, bool *inconsistent);

/**
 * Serializes the set to JSON. The caller frees the string with
 * [`wheelbks_string_free`].
 *
 * # Safety
 * All pointers must be valid.
 */
WheelbksStatus wheelbks_wheel_to_json(const WheelbksWheel *wheel, char **out);

/**
 * Contextuality witness C from n single-set weak values given as
 * parallel length-n arrays of real and imaginary parts.
 *
 * # Safety
 * `zw_re` and `zw_im` must point to `n` readable doubles; the out
 * pointers must be valid.
 */
WheelbksStatus wheelbks_witness(size_t n,
                                const double *zw_re,
                                const double *zw_im,
                                double *out_re,
                                double *out_im);

/**
 * Weak value of forbidden projector j (0 <= j < 2^(n-1)) from n
 * single-set weak values.
 *
 * # Safety
 * Same contract as [`wheelbks_witness`].
 */
WheelbksStatus wheelbks_projector(size_t n,
                                  uint64_t j,
                                  const double *zw_re,
                                  const double *zw_im,
                                  double *out_re,
                                  double *out_im);

/**
 * Stores a handle to the bundled 17-set measured table in `out`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
WheelbksStatus wheelbks_table_bundled(WheelbksTable **out);

/**
 * Parses a measured table from CSV text
 * (`set_id,re,re_sigma,im,im_sigma`) and stores a handle in `out`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be valid.
 */
WheelbksStatus wheelbks_table_from_csv(const char *text, WheelbksTable **out);

/**
 * Releases a table handle. Null is ignored.
 *
 * # Safety
 * `table` must have come from a table constructor and not yet be freed.
 */
void wheelbks_table_free(WheelbksTable *table);

/**
 * Writes the number of rows in the table.
 *
 * # Safety
 * All pointers must be valid.
 */
WheelbksStatus wheelbks_table_len(const WheelbksTable *table, size_t *len);

/**
 * Contextuality witness over table rows 1..=n with propagated
 * uncertainties. `mc_samples` and `threads` only matter for the
 * Monte Carlo method.
 *
 * # Safety
 * All pointers must be valid.
 */
WheelbksStatus wheelbks_witness_propagated(const WheelbksTable *table,
                                           size_t n,
                                           WheelbksMethod method,
                                           size_t mc_samples,
                                           uint64_t seed,
                                           size_t threads,
                                           WheelbksEstimate *out);

/**
 * Forbidden-projector weak value over table rows 1..=n with propagated
 * uncertainties.
 *
 * # Safety
 * All pointers must be valid.
 */
WheelbksStatus wheelbks_projector_propagated(const WheelbksTable *table,
                                             size_t n,
                                             uint64_t j,
                                             WheelbksMethod method,
                                             size_t mc_samples,
                                             uint64_t seed,
                                             size_t threads,
                                             WheelbksEstimate *out);

/**
 * Simulates one seeded interferometric acquisition at `alpha_deg` and
 * extracts the spin weak value (ideal answer: re 0, im 1).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
WheelbksStatus wheelbks_simulate_extract(double alpha_deg, uint64_t seed, WheelbksEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WHEELBKS_H */
