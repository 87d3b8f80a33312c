#ifndef LOGCAVE_H
#define LOGCAVE_H

/* Generated from the logcave-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code carried by every API call.
typedef enum LgcStatus {
  LGC_STATUS_OK = 0,
  // Invalid argument or configuration.
  LGC_STATUS_INVALID = 1,
  // Iterative projection failed to converge.
  LGC_STATUS_PROJECTION_DIVERGED = 2,
  // Numeric failure (non-finite state, collapsed acceptance, ...).
  LGC_STATUS_NUMERIC = 3,
  // I/O failure.
  LGC_STATUS_IO = 4,
  // A required pointer argument was NULL.
  LGC_STATUS_NULL_ARGUMENT = 5,
  // Internal panic caught at the boundary.
  LGC_STATUS_PANIC = 6,
} LgcStatus;

// Opaque convex-body handle.
typedef struct lgc_body lgc_body;

// Opaque potential handle.
typedef struct lgc_potential lgc_potential;

// Opaque trajectory handle: the chain states plus boundary local-time
// events produced by one sampling run.
typedef struct lgc_trajectory lgc_trajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message for this thread (empty string if none). The pointer
// stays valid until the next failing call on the same thread.
const char *lgc_last_error_message(void);

// Euclidean ball of the given radius in dimension `n`.
//
// # Safety
// `out` must be a valid pointer. The result must be released with
// `lgc_body_free`.
enum LgcStatus lgc_body_ball(size_t n, double radius, struct lgc_body **out);

// Axis-aligned box with the given per-coordinate bounds (`n` entries each).
//
// # Safety
// `lower`/`upper` must point to `n` readable doubles; `out` must be valid.
enum LgcStatus lgc_body_box(size_t n,
                            const double *lower,
                            const double *upper,
                            struct lgc_body **out);

// Resolve a body from an alias (`box{n}`, `ball{n}`, `boxball{n}`) or a
// body-file path, exactly like the CLI `--body` flag.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be valid.
enum LgcStatus lgc_body_resolve(const char *spec, struct lgc_body **out);

// # Safety
// `body` must be a live handle from this library, or NULL (no-op).
void lgc_body_free(struct lgc_body *body);

// Ambient dimension, or 0 if `body` is NULL.
//
// # Safety
// `body` must be a live handle or NULL.
size_t lgc_body_dim(const struct lgc_body *body);

// Writes 1 to `out` if `x` lies in the body, else 0.
//
// # Safety
// `x` must point to `len` doubles with `len` equal to the body dimension;
// `out` must be valid.
enum LgcStatus lgc_body_membership(const struct lgc_body *body,
                                   const double *x,
                                   size_t len,
                                   int32_t *out);

// Euclidean projection of `x` onto the body, written in place.
//
// # Safety
// `x` must point to `len` writable doubles with `len` equal to the body
// dimension.
enum LgcStatus lgc_body_project(const struct lgc_body *body, double *x, size_t len);

// Minkowski gauge of `x` with respect to the body.
//
// # Safety
// `x` must point to `len` doubles; `out` must be valid.
enum LgcStatus lgc_body_gauge(const struct lgc_body *body,
                              const double *x,
                              size_t len,
                              double *out);

// Uniform (zero) potential.
//
// # Safety
// `out` must be valid; release the result with `lgc_potential_free`.
enum LgcStatus lgc_potential_uniform(struct lgc_potential **out);

// Potential from a CLI-style spec (`uniform`, `gaussian`,
// `gaussian:<sigma>`) relative to the given body.
//
// # Safety
// `spec` must be NUL-terminated; `body` live; `out` valid.
enum LgcStatus lgc_potential_parse(const char *spec,
                                   const struct lgc_body *body,
                                   struct lgc_potential **out);

// # Safety
// `potential` must be a live handle from this library, or NULL (no-op).
void lgc_potential_free(struct lgc_potential *potential);

// Run the projected Langevin chain for `steps` steps at step size `eta`
// from the body's center, returning a trajectory handle.
//
// # Safety
// `body`/`potential` must be live handles; `out` valid. Release the result
// with `lgc_trajectory_free`.
enum LgcStatus lgc_run_lmc(const struct lgc_body *body,
                           const struct lgc_potential *potential,
                           double eta,
                           size_t steps,
                           uint64_t seed,
                           struct lgc_trajectory **out);

// Number of stored states (steps + 1), or 0 for NULL.
//
// # Safety
// `traj` must be a live handle or NULL.
size_t lgc_trajectory_states(const struct lgc_trajectory *traj);

// Ambient dimension of the stored states, or 0 for NULL/empty.
//
// # Safety
// `traj` must be a live handle or NULL.
size_t lgc_trajectory_dim(const struct lgc_trajectory *traj);

// Copy state `k` into `buf` (`len` must equal the trajectory dimension).
//
// # Safety
// `buf` must point to `len` writable doubles.
enum LgcStatus lgc_trajectory_state(const struct lgc_trajectory *traj,
                                    size_t k,
                                    double *buf,
                                    size_t len);

// Number of boundary local-time events, or 0 for NULL.
//
// # Safety
// `traj` must be a live handle or NULL.
size_t lgc_trajectory_events(const struct lgc_trajectory *traj);

// Read event `i`: producing step index, time, mass, and the outer unit
// normal (`normal_len` must equal the trajectory dimension). Any out
// pointer may be NULL to skip that field; `normal` NULL skips the normal.
//
// # Safety
// Non-NULL out pointers must be valid; `normal` must hold `normal_len`
// writable doubles when non-NULL.
enum LgcStatus lgc_trajectory_event(const struct lgc_trajectory *traj,
                                    size_t i,
                                    size_t *step_index,
                                    double *time,
                                    double *mass,
                                    double *normal,
                                    size_t normal_len);

// # Safety
// `traj` must be a live handle from this library, or NULL (no-op).
void lgc_trajectory_free(struct lgc_trajectory *traj);

// Gaussian-cooling volume estimate. `use_hit_and_run` 0 drives the phases
// with projected Langevin, nonzero with hit-and-run.
//
// # Safety
// `body` must be live; `out` valid.
enum LgcStatus lgc_volume(const struct lgc_body *body,
                          size_t samples_per_phase,
                          int32_t use_hit_and_run,
                          uint64_t seed,
                          double *out);

// Theoretical step-size schedule. `uniform_case` nonzero selects the
// uniform-target rates, zero the general log-concave rates (which consume
// `lipschitz_l` and `smooth_beta`). Writes the step size and step count.
//
// # Safety
// `out_eta`/`out_steps` must be valid pointers.
enum LgcStatus lgc_schedule_theorem(size_t n,
                                    double circumradius,
                                    double epsilon,
                                    int32_t uniform_case,
                                    double lipschitz_l,
                                    double smooth_beta,
                                    double *out_eta,
                                    double *out_steps);

// The practical step rule eta = 1/(beta n^2); beta <= 0 falls back to a
// unit-scale Gaussian (beta = 1).
//
// # Safety
// `out` must be a valid pointer.
enum LgcStatus lgc_schedule_practical(double beta, size_t n, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LOGCAVE_H */
