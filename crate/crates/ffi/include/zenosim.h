#ifndef ZENOSIM_H
#define ZENOSIM_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZsStatus {
  ZS_STATUS_OK = 0,
  ZS_STATUS_NULL_POINTER = 1,
  ZS_STATUS_INVALID_ARGUMENT = 2,
  ZS_STATUS_DIMENSION_MISMATCH = 3,
  ZS_STATUS_NOT_HERMITIAN = 4,
  ZS_STATUS_NOT_IDEMPOTENT = 5,
  ZS_STATUS_INVALID_STATE = 6,
  ZS_STATUS_DEGENERATE_BRANCH = 7,
  ZS_STATUS_CAPACITY = 8,
  ZS_STATUS_PRECONDITION = 9,
  ZS_STATUS_BUFFER_TOO_SMALL = 10,
  ZS_STATUS_PANIC = 11,
  ZS_STATUS_OTHER = 12,
} ZsStatus;

typedef enum ZsAnswer {
  ZS_ANSWER_NO = 0,
  ZS_ANSWER_YES = 1,
} ZsAnswer;

/**
 * Opaque projector.
 */
typedef struct ZsProjector ZsProjector;

/**
 * Opaque Zeno protocol.
 */
typedef struct ZsProtocol ZsProtocol;

/**
 * Opaque weight operator.
 */
typedef struct ZsWeightOperator ZsWeightOperator;

/**
 * Ion estimate in SI units.
 */
typedef struct ZsEstimate {
  double delta_v;
  double v_thermal;
  double velocity_ratio;
  double transit_time;
  double spread_at_trigger;
  double spread_to_ion_size;
} ZsEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *zs_version(void);

/**
 * Message for the last failed call on this thread, empty after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *zs_last_error_message(void);

/**
 * Validates and copies a `dim x dim` weight operator.
 *
 * # Safety
 * `re` (and `im` unless null) must point to `dim * dim` readable doubles.
 */
enum ZsStatus zs_weight_operator_new(size_t dim,
                                     const double *re,
                                     const double *im,
                                     struct ZsWeightOperator **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum ZsStatus zs_weight_operator_basis_state(size_t dim,
                                             size_t index,
                                             struct ZsWeightOperator **out);

/**
 * # Safety
 * `s` must be null or a handle from this library not yet freed.
 */
void zs_weight_operator_free(struct ZsWeightOperator *s);

/**
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum ZsStatus zs_weight_operator_dim(const struct ZsWeightOperator *s, size_t *out);

/**
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum ZsStatus zs_weight_operator_trace(const struct ZsWeightOperator *s, double *out);

/**
 * Copies the entries row-major into `re` and `im`, each holding `len` doubles.
 *
 * # Safety
 * `re` and `im` must point to `len` writable doubles.
 */
enum ZsStatus zs_weight_operator_entries(const struct ZsWeightOperator *s,
                                         double *re,
                                         double *im,
                                         size_t len);

/**
 * Validates and copies a `dim x dim` projector.
 *
 * # Safety
 * `re` (and `im` unless null) must point to `dim * dim` readable doubles.
 */
enum ZsStatus zs_projector_new(size_t dim,
                               const double *re,
                               const double *im,
                               struct ZsProjector **out);

/**
 * Projector onto the listed computational basis vectors.
 *
 * # Safety
 * `indices` must point to `count` readable values.
 */
enum ZsStatus zs_projector_onto_basis(size_t dim,
                                      const size_t *indices,
                                      size_t count,
                                      struct ZsProjector **out);

/**
 * # Safety
 * `p` must be null or a handle from this library not yet freed.
 */
void zs_projector_free(struct ZsProjector *p);

/**
 * `Tr(S P) / Tr S`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum ZsStatus zs_probability_yes(const struct ZsWeightOperator *s,
                                 const struct ZsProjector *p,
                                 double *out);

/**
 * `P S P + (1-P) S (1-P)` as a new handle.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum ZsStatus zs_process1(const struct ZsWeightOperator *s,
                          const struct ZsProjector *p,
                          struct ZsWeightOperator **out);

/**
 * Unnormalized `P S P` (Yes) or `(1-P) S (1-P)` (No) as a new handle.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum ZsStatus zs_apply_answer(const struct ZsWeightOperator *s,
                              const struct ZsProjector *p,
                              enum ZsAnswer answer,
                              struct ZsWeightOperator **out);

/**
 * `exp(-iHd) S exp(iHd)` for a Hermitian `H` given row-major.
 *
 * # Safety
 * `s` must be live, `h_re` (and `h_im` unless null) must hold `dim * dim`
 * doubles where `dim` is the state dimension, and `out` writable.
 */
enum ZsStatus zs_evolve_unitary(const struct ZsWeightOperator *s,
                                const double *h_re,
                                const double *h_im,
                                double d,
                                struct ZsWeightOperator **out);

/**
 * Protocol over `[0, total_time]` with `event_count` events. The Hamiltonian
 * has the projector's dimension.
 *
 * # Safety
 * `p` must be live, `h_re` (and `h_im` unless null) must hold `dim * dim`
 * doubles, and `out` writable.
 */
enum ZsStatus zs_protocol_new(double total_time,
                              size_t event_count,
                              const double *h_re,
                              const double *h_im,
                              const struct ZsProjector *p,
                              struct ZsProtocol **out);

/**
 * Adds computational-basis dephasing at `rate`.
 *
 * # Safety
 * `protocol` must be a live handle.
 */
enum ZsStatus zs_protocol_set_dephasing(struct ZsProtocol *protocol, double rate);

/**
 * # Safety
 * `protocol` must be null or a handle from this library not yet freed.
 */
void zs_protocol_free(struct ZsProtocol *protocol);

/**
 * Survival probability from the answer-averaged evolution.
 *
 * # Safety
 * Handles must be live and `survival` writable.
 */
enum ZsStatus zs_protocol_run_expected(const struct ZsProtocol *protocol,
                                       const struct ZsWeightOperator *initial,
                                       double *survival);

/**
 * All-Yes fraction over `trajectories` sampled runs and its binomial
 * standard error. Identical arguments give identical results.
 *
 * # Safety
 * Handles must be live and both outputs writable.
 */
enum ZsStatus zs_protocol_run_sampled(const struct ZsProtocol *protocol,
                                      const struct ZsWeightOperator *initial,
                                      uint64_t trajectories,
                                      uint64_t root_seed,
                                      double *survival,
                                      double *stderr);

/**
 * Ion estimate from lab units (u, K, nm). Transit distance may be zero.
 *
 * # Safety
 * `out` must be writable.
 */
enum ZsStatus zs_ion_estimate(double mass_u,
                              double temperature_k,
                              double channel_width_nm,
                              double transit_distance_nm,
                              double ion_diameter_nm,
                              struct ZsEstimate *out);

/**
 * Default calcium estimate.
 *
 * # Safety
 * `out` must be writable.
 */
enum ZsStatus zs_calcium_estimate(struct ZsEstimate *out);

/**
 * Writes the `2^terminal_count` release-pattern weights; bit `t` of the
 * index set means terminal `t` released.
 *
 * # Safety
 * `weights` must point to `len` writable doubles.
 */
enum ZsStatus zs_branch_weights(uint32_t terminal_count,
                                double release_probability,
                                double *weights,
                                size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZENOSIM_H */
