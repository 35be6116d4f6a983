#ifndef CAVITY_CPS_H
#define CAVITY_CPS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum CpsStatus {
  CPS_STATUS_OK = 0,
  CPS_STATUS_NULL_POINTER = 1,
  CPS_STATUS_DOMAIN = 2,
  CPS_STATUS_REGIME = 3,
  CPS_STATUS_NUMERICAL = 4,
  CPS_STATUS_DEGENERATE_SECTOR = 5,
  CPS_STATUS_ZERO_PROBABILITY = 6,
  CPS_STATUS_CONFIG = 7,
  CPS_STATUS_IO = 8,
  CPS_STATUS_BUFFER_TOO_SMALL = 9,
  CPS_STATUS_PANIC = 10,
} CpsStatus;

/**
 * Opaque set of Kraus field operators at one time.
 */
typedef struct CpsKraus CpsKraus;

/**
 * Opaque parameter set.
 */
typedef struct CpsParams CpsParams;

typedef struct CpsComplex {
  double re;
  double im;
} CpsComplex;

/**
 * Gate figures of merit for the conditional phase operation.
 */
typedef struct CpsGateReport {
  double t_int;
  double probability;
  /**
   * NaN when the ground-state outcome has zero probability.
   */
  double fidelity;
  double deviation_diag;
  double deviation_offdiag;
} CpsGateReport;

typedef struct CpsEprReport {
  double t_int;
  double probability;
  double fidelity;
  double concurrence;
} CpsEprReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread (empty after success).
 * Valid until the next call into this library from the same thread.
 */
const char *cps_last_error(void);

/**
 * Static description of a status code (any integer is accepted).
 */
const char *cps_status_message(int32_t status);

/**
 * Resonant parameters with `g_a = g_b = g_c = g`, `Ω_1 = Ω_2 = omega`
 * (real) and `N_max = 1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CpsStatus cps_params_new_equal(double g, double omega, struct CpsParams **out);

/**
 * General parameter set.
 *
 * # Safety
 * `g` must point to 3 values, `omega` to 2 and `detunings` to 6 (or be
 * null for resonance); `out` must be valid for writes.
 */
enum CpsStatus cps_params_new(const struct CpsComplex *g,
                              const struct CpsComplex *omega,
                              const double *detunings,
                              size_t n_max,
                              struct CpsParams **out);

/**
 * # Safety
 * `params` must come from a `cps_params_new*` call and not be used again.
 */
void cps_params_free(struct CpsParams *params);

/**
 * Dimension `(N_max + 1)^3` of the field space.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CpsStatus cps_params_field_dim(const struct CpsParams *params, size_t *out);

/**
 * Numerical Kraus operators at time `t`, atom starting in the ground state.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CpsStatus cps_kraus_compute(const struct CpsParams *params, double t, struct CpsKraus **out);

/**
 * # Safety
 * `kraus` must come from `cps_kraus_compute` and not be used again.
 */
void cps_kraus_free(struct CpsKraus *kraus);

/**
 * Copy `K_level` (level 1..=6) row-major into `buf` of `len` entries.
 *
 * # Safety
 * `buf` must be valid for `len` writes.
 */
enum CpsStatus cps_kraus_get(const struct CpsKraus *kraus,
                             uint8_t level,
                             struct CpsComplex *buf,
                             size_t len);

/**
 * `‖Σ K_j† K_j − 1‖_max`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CpsStatus cps_kraus_completeness(const struct CpsKraus *kraus, double *out);

/**
 * Diagonal of the closed-form `K_1(t)` (resonance required).
 *
 * # Safety
 * `buf` must be valid for `len` writes.
 */
enum CpsStatus cps_k1_analytic_diag(const struct CpsParams *params,
                                    double t,
                                    double *buf,
                                    size_t len);

/**
 * Gate time `√2·π·|Ω|/|g|²·(1 + 2k)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CpsStatus cps_interaction_time(const struct CpsParams *params, uint32_t k, double *out);

/**
 * Gate report at time `t` for an 8×8 row-major density `rho`
 * (null selects the default test state).
 *
 * # Safety
 * `rho` must be null or point to 64 entries; `out` must be valid.
 */
enum CpsStatus cps_gate_report(const struct CpsParams *params,
                               double t,
                               const struct CpsComplex *rho,
                               struct CpsGateReport *out);

/**
 * Run the EPR preparation protocol (all couplings and Rabi magnitudes equal).
 *
 * # Safety
 * Pointers must be valid.
 */
enum CpsStatus cps_epr_protocol(const struct CpsParams *params, struct CpsEprReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAVITY_CPS_H */
