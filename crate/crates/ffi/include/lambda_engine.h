#ifndef LAMBDA_ENGINE_H
#define LAMBDA_ENGINE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum LeStatus {
  LE_STATUS_OK = 0,
  LE_STATUS_NULL_POINTER = 1,
  LE_STATUS_INVALID_ARGUMENT = 2,
  LE_STATUS_SOLVER_FAILURE = 3,
  LE_STATUS_UNSUPPORTED = 4,
  LE_STATUS_PANIC = 5,
} LeStatus;

typedef enum LeModulation {
  LE_MODULATION_FIRST_ORDER = 0,
  LE_MODULATION_EXACT = 1,
} LeModulation;

typedef enum LeLevel {
  LE_LEVEL_G = 0,
  LE_LEVEL_GP = 1,
  LE_LEVEL_E = 2,
} LeLevel;

/**
 * A periodic steady state: harmonic amplitudes plus derived fluxes.
 */
typedef struct LeFloquet LeFloquet;

/**
 * Engine parameters. Create with `le_params_new`.
 */
typedef struct LeParams LeParams;

typedef struct LeComplex {
  double re;
  double im;
} LeComplex;

typedef struct LePopulations {
  double gg;
  double gpgp;
  double ee;
} LePopulations;

/**
 * Period-averaged energy fluxes with ħ = 1.
 */
typedef struct LeFluxes {
  double p_c;
  double qdot_c;
  double qdot_out;
  double qdot_h;
  double edot;
  /**
   * Meaningful only when `efficiency_defined` is true.
   */
  double efficiency;
  bool efficiency_defined;
} LeFluxes;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or an empty string.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *le_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *le_version(void);

/**
 * New parameter set with default values. Never NULL.
 */
struct LeParams *le_params_new(void);

/**
 * # Safety
 * `params` must come from `le_params_new` and not have been freed. NULL is a no-op.
 */
void le_params_free(struct LeParams *params);

/**
 * Sets a parameter by name (`eta`, `n_h`, `omega_rabi`, ...). The new value
 * is validated; on failure the parameters are left unchanged.
 *
 * # Safety
 * `params` must be a live handle and `name` a NUL-terminated string.
 */
enum LeStatus le_params_set(struct LeParams *params, const char *name, double value);

/**
 * # Safety
 * `params` must be a live handle, `name` a NUL-terminated string and `out`
 * writable.
 */
enum LeStatus le_params_get(const struct LeParams *params, const char *name, double *out);

/**
 * # Safety
 * `params` must be a live handle.
 */
enum LeStatus le_params_set_modulation(struct LeParams *params, enum LeModulation mode);

/**
 * Closed-form gain on both sideband branches.
 *
 * # Safety
 * `params` must be a live handle; `plus` and `minus` writable.
 */
enum LeStatus le_gain(const struct LeParams *params,
                      struct LeComplex *plus,
                      struct LeComplex *minus);

/**
 * Closed-form steady-state populations.
 *
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum LeStatus le_populations(const struct LeParams *params, struct LePopulations *out);

/**
 * Periodic steady state by harmonic balance at order `l_max`. On success
 * `*out` receives a handle to free with `le_floquet_free`.
 *
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum LeStatus le_harmonic_balance(const struct LeParams *params,
                                  size_t l_max,
                                  struct LeFloquet **out);

/**
 * Periodic steady state by time-domain integration to a stroboscopic fixed
 * point, reduced to harmonics up to `l_max`.
 *
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum LeStatus le_time_domain(const struct LeParams *params,
                             double tol,
                             size_t l_max,
                             struct LeFloquet **out);

/**
 * # Safety
 * `fc` must be a live handle or NULL.
 */
size_t le_floquet_lmax(const struct LeFloquet *fc);

/**
 * Harmonic amplitude ρ_jk,l. Harmonics beyond the truncation are zero.
 *
 * # Safety
 * `fc` must be a live handle; `out` writable.
 */
enum LeStatus le_floquet_get(const struct LeFloquet *fc,
                             enum LeLevel j,
                             enum LeLevel k,
                             int32_t l,
                             struct LeComplex *out);

/**
 * Linear-response probe gain of the steady state.
 *
 * # Safety
 * `fc` must be a live handle; `out` writable.
 */
enum LeStatus le_floquet_gain(const struct LeFloquet *fc, struct LeComplex *out);

/**
 * Period-averaged energy fluxes of the steady state.
 *
 * # Safety
 * `fc` must be a live handle; `out` writable.
 */
enum LeStatus le_floquet_fluxes(const struct LeFloquet *fc, struct LeFluxes *out);

/**
 * # Safety
 * `fc` must come from a solver call and not have been freed. NULL is a no-op.
 */
void le_floquet_free(struct LeFloquet *fc);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAMBDA_ENGINE_H */
