#ifndef CONIC_CH_H
#define CONIC_CH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CchStatus {
  CCH_STATUS_OK = 0,
  CCH_STATUS_NULL_POINTER = 1,
  CCH_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad configuration or parameters.
   */
  CCH_STATUS_VALIDATION = 3,
  /**
   * The computation failed (non-finite state, eigensolver failure, ...).
   */
  CCH_STATUS_RUNTIME = 4,
  /**
   * Output buffer too small.
   */
  CCH_STATUS_BUFFER_TOO_SMALL = 5,
  CCH_STATUS_PANIC = 6,
} CchStatus;

/**
 * Opaque simulation handle.
 */
typedef struct CchSimulation CchSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread; empty after a success. The
 * pointer stays valid until the next library call on this thread.
 */
const char *cch_last_error_message(void);

/**
 * Create a simulation from `key = value` configuration text (NULL for the
 * defaults). The initial field is built immediately.
 *
 * # Safety
 * `config` must be NULL or a NUL-terminated string; `out` must be a valid pointer.
 */
enum CchStatus cch_simulation_new(const char *config, struct CchSimulation **out);

/**
 * Release a handle. NULL is ignored.
 *
 * # Safety
 * `sim` must be NULL or a handle from [`cch_simulation_new`] not yet freed.
 */
void cch_simulation_free(struct CchSimulation *sim);

/**
 * Advance by `n_steps` time steps.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum CchStatus cch_simulation_step(struct CchSimulation *sim, size_t n_steps);

/**
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum CchStatus cch_simulation_time(const struct CchSimulation *sim, double *out);

/**
 * Discrete Ginzburg-Landau energy of the current field.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum CchStatus cch_simulation_energy(const struct CchSimulation *sim, double *out);

/**
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum CchStatus cch_simulation_mass(const struct CchSimulation *sim, double *out);

/**
 * Grid shape: radial nodes and angles.
 *
 * # Safety
 * `sim` must be a live handle; `n_radial` and `n_theta` valid pointers.
 */
enum CchStatus cch_simulation_shape(const struct CchSimulation *sim,
                                    size_t *n_radial,
                                    size_t *n_theta);

/**
 * Copy the field, row-major `[radial][theta]`, into `buf` of length `len`.
 *
 * # Safety
 * `sim` must be a live handle and `buf` valid for `len` writes.
 */
enum CchStatus cch_simulation_field(const struct CchSimulation *sim, double *buf, size_t len);

/**
 * Admissible weight window for cross-section dimension `n` and first
 * nonzero eigenvalue `lambda1 < 0`.
 *
 * # Safety
 * `lo` and `hi` must be valid pointers.
 */
enum CchStatus cch_gamma_window(uint32_t n, double lambda1, double *lo, double *hi);

/**
 * Indicial report of the model cone as a JSON string; release it with
 * [`cch_string_free`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CchStatus cch_indicial_report_json(uint32_t n, double alpha, double gamma, char **out);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string from this library not yet freed.
 */
void cch_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONIC_CH_H */
