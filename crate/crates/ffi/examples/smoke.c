/* Copyright 2026 the wheelbks developers. Apache-2.0.
 *
 * Minimal C consumer of the wheelbks C ABI. Build with:
 *
 *   cargo build -p wheelbks-ffi --release
 *   cc -std=c11 -I crates/ffi/include crates/ffi/examples/smoke.c \
 *      target/release/libwheelbks_ffi.a -lpthread -lm -ldl -o smoke
 */
#include <assert.h>
#include <stdio.h>
#include "wheelbks.h"

int main(void) {
  WheelbksWheel *wheel = NULL;
  assert(wheelbks_wheel_build(5, &wheel) == WHEELBKS_STATUS_OK);
  size_t observables = 0, contexts = 0;
  assert(wheelbks_wheel_shape(wheel, &observables, &contexts) == WHEELBKS_STATUS_OK);
  assert(observables == 15 && contexts == 8);
  bool inconsistent = false;
  assert(wheelbks_wheel_nchv_inconsistent(wheel, &inconsistent) == WHEELBKS_STATUS_OK);
  assert(inconsistent);
  wheelbks_wheel_free(wheel);

  double re[5] = {0, 0, 0, 0, 0};
  double im[5] = {1, 1, 1, 1, 1};
  double c_re = 0, c_im = 0;
  assert(wheelbks_witness(5, re, im, &c_re, &c_im) == WHEELBKS_STATUS_OK);
  assert(c_re == -3.0 && c_im == 0.0);

  WheelbksTable *table = NULL;
  assert(wheelbks_table_bundled(&table) == WHEELBKS_STATUS_OK);
  WheelbksEstimate est;
  assert(wheelbks_witness_propagated(table, 5, WHEELBKS_METHOD_FIRST_ORDER, 0, 0, 1, &est) == WHEELBKS_STATUS_OK);
  printf("C = %.4f +/- %.4f\n", est.re, est.re_sigma);
  assert(est.re < -2.8 && est.re > -2.9);
  wheelbks_table_free(table);

  assert(wheelbks_wheel_build(4, &wheel) == WHEELBKS_STATUS_USAGE_ERROR);
  char *msg = wheelbks_last_error();
  assert(msg != NULL);
  printf("expected failure: %s\n", msg);
  wheelbks_string_free(msg);
  puts("ok");
  return 0;
}
