#ifndef HALL_STEADY_H
#define HALL_STEADY_H

/* Generated by cbindgen from hall-steady-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; aligned with the CLI exit codes where they overlap.
 */
typedef enum HsStatus {
  HsOk = 0,
  /**
   * Invalid configuration, malformed input, or I/O failure.
   */
  HsErrConfig = 2,
  /**
   * Solver failure: non-convergence of an inner solve, compatibility
   * violation, or non-finite values.
   */
  HsErrSolver = 3,
  /**
   * A required pointer argument was NULL.
   */
  HsErrNullArgument = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  HsErrUtf8 = 5,
} HsStatus;

/**
 * Named solution norms.
 */
typedef enum HsNorm {
  HsNormUL2 = 0,
  HsNormUH1 = 1,
  HsNormBL2 = 2,
  HsNormBH1 = 3,
  HsNormBW1Q = 4,
  HsNormPL2 = 5,
} HsNorm;

/**
 * Opaque solver configuration.
 */
typedef struct HsConfig HsConfig;

/**
 * Opaque solve artifacts: final state, iteration report, and the forcing
 * the run used.
 */
typedef struct HsSolveResult HsSolveResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent error on this thread (empty if none). The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *hs_last_error_message(void);

/**
 * New configuration with the documented defaults.
 */
struct HsConfig *hs_config_new(void);

/**
 * Parse a full key = value configuration text.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be a valid
 * pointer to receive the handle.
 */
enum HsStatus hs_config_parse(const char *text, struct HsConfig **out);

/**
 * Set one key to a value, using the same keys as the configuration file.
 *
 * # Safety
 * `cfg` must be a live handle from this library; `key` and `value` must be
 * valid NUL-terminated strings.
 */
enum HsStatus hs_config_set(struct HsConfig *cfg, const char *key, const char *value);

/**
 * # Safety
 * `cfg` must be a handle previously returned by this library, not yet freed.
 */
void hs_config_free(struct HsConfig *cfg);

/**
 * Solve the steady problem with the configured forcing. On success the
 * result handle is written to `out`. Non-convergence within the iteration
 * cap is reported through the result handle, not as an error.
 *
 * # Safety
 * `cfg` must be a live configuration handle; `out` must be valid.
 */
enum HsStatus hs_solve(const struct HsConfig *cfg, struct HsSolveResult **out);

/**
 * 1 if the Picard iteration converged, 0 otherwise.
 *
 * # Safety
 * `res` must be a live result handle.
 */
int32_t hs_result_converged(const struct HsSolveResult *res);

/**
 * Number of Picard iterations performed.
 *
 * # Safety
 * `res` must be a live result handle.
 */
uintptr_t hs_result_iterations(const struct HsSolveResult *res);

/**
 * Relative nonlinear residual of the returned state.
 *
 * # Safety
 * `res` must be a live result handle.
 */
double hs_result_final_residual(const struct HsSolveResult *res);

/**
 * Query a norm of the solution state; NaN on a bad handle.
 *
 * # Safety
 * `res` must be a live result handle.
 */
double hs_result_norm(const struct HsSolveResult *res, enum HsNorm which);

/**
 * Write u.dump, p.dump, b.dump, iterations.csv, report.txt, and
 * diagnostics.txt into `dir` (created if missing), same formats as the CLI.
 *
 * # Safety
 * `res` must be a live result handle; `dir` a valid NUL-terminated string.
 */
enum HsStatus hs_result_write_outputs(const struct HsSolveResult *res, const char *dir);

/**
 * # Safety
 * `res` must be a handle previously returned by this library, not yet freed.
 */
void hs_result_free(struct HsSolveResult *res);

/**
 * Run the operator invariant suites at resolution `n`; returns `HS_OK` when
 * every check passes.
 */
enum HsStatus hs_check_operators(uintptr_t n, uint64_t seed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HALL_STEADY_H */
