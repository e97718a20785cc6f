#ifndef JCFLOW_H
#define JCFLOW_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JcStatus {
  JC_STATUS_OK = 0,
  JC_STATUS_NULL_POINTER = 1,
  JC_STATUS_INVALID_PARAMS = 2,
  JC_STATUS_INVALID_CONFIG = 3,
  JC_STATUS_DOMAIN = 4,
  JC_STATUS_INDEX = 5,
  JC_STATUS_PHASE = 6,
  JC_STATUS_NOT_HERMITIAN = 7,
  JC_STATUS_DIMENSION_MISMATCH = 8,
  JC_STATUS_INTEGRATOR_FAILURE = 9,
  JC_STATUS_BUFFER_TOO_SMALL = 10,
  JC_STATUS_PANIC = 11,
} JcStatus;

/**
 * Model parameters plus Fock truncation.
 */
typedef struct JcModel JcModel;

/**
 * Sampled flow of a Hermitian matrix.
 */
typedef struct JcTrajectory JcTrajectory;

/**
 * Block coefficients `A_n`, `B_n`, `C_n` at one flow parameter.
 */
typedef struct JcBlock {
  double a;
  double b;
  double c;
} JcBlock;

/**
 * Block unitary `[[alpha, gamma], [delta, beta]]`.
 */
typedef struct JcUnitaryBlock {
  double alpha;
  double beta;
  double gamma;
  double delta;
} JcUnitaryBlock;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * success. Valid until the next call into this library on the same thread.
 */
const char *jc_last_error_message(void);

/**
 * Creates a model. Requires `omega0 > omega`, `lambda > 0`, `n_max >= 1`.
 */
enum JcStatus jc_model_new(double omega0,
                           double omega,
                           double lambda,
                           size_t n_max,
                           struct JcModel **out);

void jc_model_free(struct JcModel *m);

/**
 * Dimension `2(n_max + 1)` of the truncated space.
 */
enum JcStatus jc_model_dim(const struct JcModel *m, size_t *out);

/**
 * `Omega_n = sqrt(Delta^2 + 4 lambda^2 (n + 1))`.
 */
enum JcStatus jc_rabi_frequency(const struct JcModel *m, size_t n, double *out);

enum JcStatus jc_closed_form_block(const struct JcModel *m,
                                   size_t n,
                                   double l,
                                   struct JcBlock *out);

enum JcStatus jc_unitary_coeffs(const struct JcModel *m,
                                size_t n,
                                double l,
                                struct JcUnitaryBlock *out);

/**
 * Atom populations `s_+`, `s_-` of the flow-transformed state `|e, n>`.
 */
enum JcStatus jc_s_pm(const struct JcModel *m, size_t n, double l, double *s_plus, double *s_minus);

/**
 * Entanglement entropy (nats) after flowing to `l` and evolving for time
 * `t`; `t = 0` gives the flow entropy.
 */
enum JcStatus jc_entropy(const struct JcModel *m, size_t n, double l, double t, double *out);

/**
 * Writes `H(l)` into `buf` (`2 * dim * dim` doubles). `l = 0` is the bare
 * Hamiltonian.
 */
enum JcStatus jc_flowed_hamiltonian(const struct JcModel *m, double l, double *buf, size_t len);

/**
 * Writes the flow unitary `U(l)` into `buf` (`2 * dim * dim` doubles).
 */
enum JcStatus jc_unitary(const struct JcModel *m, double l, double *buf, size_t len);

/**
 * Integrates the Wegner flow of a Hermitian `dim × dim` matrix given as an
 * interleaved complex buffer, sampling at the `grid_len` increasing points
 * of `grid` (the sample at `l = 0` is always included). Tolerances of 0
 * select the defaults.
 */
enum JcStatus jc_flow_integrate(const double *h,
                                size_t dim,
                                const double *grid,
                                size_t grid_len,
                                double rel_tol,
                                double abs_tol,
                                bool accumulate_unitary,
                                struct JcTrajectory **out);

void jc_trajectory_free(struct JcTrajectory *t);

enum JcStatus jc_trajectory_len(const struct JcTrajectory *t, size_t *out);

enum JcStatus jc_trajectory_l(const struct JcTrajectory *t, size_t i, double *out);

/**
 * Off-diagonal Frobenius norm of sample `i`.
 */
enum JcStatus jc_trajectory_offdiag_norm(const struct JcTrajectory *t, size_t i, double *out);

enum JcStatus jc_trajectory_hamiltonian(const struct JcTrajectory *t,
                                        size_t i,
                                        double *buf,
                                        size_t len);

/**
 * Fails with [`JcStatus::InvalidConfig`] when the flow ran without the
 * unitary.
 */
enum JcStatus jc_trajectory_unitary(const struct JcTrajectory *t,
                                    size_t i,
                                    double *buf,
                                    size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JCFLOW_H */
