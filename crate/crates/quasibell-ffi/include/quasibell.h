/* C interface for the quasibell library. */

#ifndef QUASIBELL_H
#define QUASIBELL_H

/* Generated by cbindgen; edit src/lib.rs instead of this file. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by every fallible call in this ABI.
typedef enum QbStatus {
  QB_STATUS_OK = 0,
  // A parameter is outside its documented domain.
  QB_STATUS_INVALID_ARGUMENT = 1,
  // A Fock cutoff too small for the requested labels.
  QB_STATUS_TRUNCATION_INSUFFICIENT = 2,
  // The requested state has zero norm at these labels.
  QB_STATUS_DEGENERATE_STATE = 3,
  // The two-dimensional basis degenerates at a pi/4 mixing angle.
  QB_STATUS_BASIS_UNDEFINED = 4,
  // The effective mass vanishes at e*theta_nc*B = 1.
  QB_STATUS_CRITICAL_PARAMETERS = 5,
  // The operation is outside the implemented regime.
  QB_STATUS_UNSUPPORTED = 6,
  // A required pointer argument was null.
  QB_STATUS_NULL_POINTER = 7,
} QbStatus;

// An entangled two-mode channel fixed by its pair of coherent labels.
// Construct with `qb_channel_new`, release with `qb_channel_free`.
typedef struct QbChannel QbChannel;

// Scalar channel invariants filled by `qb_channel_metrics`.
typedef struct QbChannelMetrics {
  double abs_alpha;
  double abs_beta;
  // Overlap of the first mode's opposite-label pair, in (0, 1].
  double s;
  // Overlap of the second mode's pair.
  double s_prime;
  // First-mode mixing angle, in (0, pi/4].
  double theta;
  // Second-mode mixing angle.
  double theta_prime;
  // Overlap between the two even-parity channel states.
  double g13;
  // Overlap between the two odd-parity channel states; NaN at the
  // degenerate point where those states have zero norm.
  double g24;
  // Concurrence of the shared channel state.
  double concurrence;
} QbChannelMetrics;

// Reduced-state data for one channel state, filled by `qb_entanglement`.
typedef struct QbEntanglement {
  // Smaller reduced eigenvalue.
  double lambda;
  // Larger reduced eigenvalue; the pair sums to one.
  double lambda_prime;
  double entropy_bits;
  double concurrence;
} QbEntanglement;

// Teleportation figures of merit filled by `qb_teleport` and
// `qb_teleport_for_angles`. Probabilities are ordered as the outcomes
// (phi+, phi-, psi+, psi-).
typedef struct QbTeleport {
  double probabilities[4];
  double fidelity;
  double concurrence;
  double masfi;
} QbTeleport;

// Effective oscillator constants filled by `qb_landau`.
typedef struct QbLandau {
  // Effective mass m(1 - e*theta_nc*B).
  double m_star;
  // Bare cyclotron frequency eB/m.
  double omega;
  // Effective frequency omega / (1 - e*theta_nc*B).
  double omega_star;
  // Momentum-space deformation theta_nc * m^2.
  double kappa;
  // Uniform level spacing hbar * omega_star.
  double level_spacing;
} QbLandau;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string; never null.
const char *qb_version(void);

// Static NUL-terminated name for a status code; never null.
const char *qb_status_name(enum QbStatus status);

// Allocates a channel for the labels `alpha = alpha_re + i alpha_im`,
// `beta = beta_re + i beta_im` and writes the handle to `out`.
//
// # Safety
// `out` must be a valid pointer. The handle must be released with
// `qb_channel_free` exactly once.
enum QbStatus qb_channel_new(double alpha_re,
                             double alpha_im,
                             double beta_re,
                             double beta_im,
                             struct QbChannel **out);

// Releases a handle from `qb_channel_new`. A null pointer is a no-op.
//
// # Safety
// `channel` must be null or a handle not yet freed.
void qb_channel_free(struct QbChannel *channel);

// Fills `out` with the channel's scalar invariants. `g24` is NaN at the
// degenerate zero-label point; everything else is total.
//
// # Safety
// `channel` must be a live handle and `out` a valid pointer.
enum QbStatus qb_channel_metrics(const struct QbChannel *channel, struct QbChannelMetrics *out);

// Returns 1 when the channel sits at the degenerate zero-label point
// (the odd-parity states vanish there), 0 otherwise, -1 on null.
//
// # Safety
// `channel` must be null or a live handle.
int32_t qb_channel_is_degenerate(const struct QbChannel *channel);

// Fills `out` with the reduced spectrum, entropy, and concurrence of
// channel state `index` (1 through 4).
//
// # Safety
// `channel` must be a live handle and `out` a valid pointer.
enum QbStatus qb_entanglement(const struct QbChannel *channel,
                              uint8_t index,
                              struct QbEntanglement *out);

// Fills `out` with the teleportation report for the channel's own mixing
// angles. Fails with `QB_STATUS_BASIS_UNDEFINED` when either angle is
// within 1e-8 of pi/4, where the protocol's qubit basis degenerates; use
// `qb_teleport_for_angles` to evaluate the closed forms there.
//
// # Safety
// `channel` must be a live handle and `out` a valid pointer.
enum QbStatus qb_teleport(const struct QbChannel *channel, struct QbTeleport *out);

// Fills `out` with the closed-form teleportation report for an explicit
// angle pair in (0, pi/4]; the pi/4 endpoint is allowed.
//
// # Safety
// `out` must be a valid pointer.
enum QbStatus qb_teleport_for_angles(double theta, double theta_prime, struct QbTeleport *out);

// Draws `shots` seeded measurement outcomes from the channel's closed-form
// probabilities and writes the four counts (phi+, phi-, psi+, psi-) to
// `out_counts`. Identical seeds reproduce identical counts.
//
// # Safety
// `channel` must be a live handle and `out_counts` must point to at least
// four writable u64 values.
enum QbStatus qb_sample_outcomes(const struct QbChannel *channel,
                                 uint64_t seed,
                                 uint64_t shots,
                                 uint64_t *out_counts);

// Fills `out` with the effective oscillator constants for a charged
// particle in a magnetic field with a noncommutative correction. Fails
// with `QB_STATUS_CRITICAL_PARAMETERS` at e*theta_nc*b_field = 1.
//
// # Safety
// `out` must be a valid pointer.
enum QbStatus qb_landau(double mass,
                        double charge,
                        double b_field,
                        double theta_nc,
                        double hbar,
                        struct QbLandau *out);

// Writes the `n`-th oscillator energy hbar * omega_star * (n + 1/2) to
// `out`, under the same parameter validation as `qb_landau`.
//
// # Safety
// `out` must be a valid pointer.
enum QbStatus qb_landau_level(double mass,
                              double charge,
                              double b_field,
                              double theta_nc,
                              double hbar,
                              uint32_t n,
                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUASIBELL_H */
