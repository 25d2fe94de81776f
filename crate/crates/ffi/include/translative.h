#ifndef TRANSLATIVE_H
#define TRANSLATIVE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TrStatus {
  TR_STATUS_OK = 0,
  TR_STATUS_NULL_POINTER = 1,
  TR_STATUS_INVALID_ARGUMENT = 2,
  TR_STATUS_PARSE = 3,
  TR_STATUS_GEOMETRY = 4,
  TR_STATUS_NOT_GENERAL_POSITION = 5,
  TR_STATUS_IO = 6,
  TR_STATUS_PANIC = 7,
} TrStatus;

/**
 * A local functional: `f_0, ..., f_{d-1}` and `c_d`.
 */
typedef struct TrFamily TrFamily;

/**
 * A convex polytope.
 */
typedef struct TrPolytope TrPolytope;

/**
 * A union of polytopes certified to be in mutual general position.
 */
typedef struct TrUnion TrUnion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *tr_last_error_message(void);

/**
 * Convex hull of `n` points given as `n * d` coordinates.
 *
 * # Safety
 * `coords` must point to `n * d` doubles and `out` must be writable.
 */
enum TrStatus tr_polytope_from_points(const double *coords,
                                      size_t n,
                                      size_t d,
                                      struct TrPolytope **out);

/**
 * Reads a polytope file (`dim d` followed by one vertex per line).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum TrStatus tr_polytope_read(const char *path, struct TrPolytope **out);

/**
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void tr_polytope_free(struct TrPolytope *p);

/**
 * Ambient dimension, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t tr_polytope_dim(const struct TrPolytope *p);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum TrStatus tr_polytope_volume(const struct TrPolytope *p, double *out);

/**
 * Family from `skeleton`, `intrinsic`, or a list such as
 * `const:1,angle:1;cd=1`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` writable.
 */
enum TrStatus tr_family_new(size_t d, const char *spec, struct TrFamily **out);

/**
 * # Safety
 * `f` must come from this library and not be used afterwards.
 */
void tr_family_free(struct TrFamily *f);

/**
 * `φ^(j)(P)`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum TrStatus tr_phi(const struct TrFamily *f, const struct TrPolytope *p, size_t j, double *out);

/**
 * `Φ^(j)(P, A)` for the box `A = [lo, hi]`.
 *
 * # Safety
 * Handles must be live, `lo` and `hi` must hold `d` doubles and `out` be
 * writable.
 */
enum TrStatus tr_extension_measure(const struct TrFamily *f,
                                   const struct TrPolytope *p,
                                   size_t j,
                                   const double *lo,
                                   const double *hi,
                                   double *out);

/**
 * `φ^(j)_{m_1..m_k}(P_1, ..., P_k)`.
 *
 * # Safety
 * `polys` and `m` must hold `k` entries of live handles and indices, and
 * `out` must be writable.
 */
enum TrStatus tr_mixed_functional(const struct TrFamily *f,
                                  size_t j,
                                  const struct TrPolytope *const *polys,
                                  const size_t *m,
                                  size_t k,
                                  double *out);

/**
 * Monte Carlo estimate of `∫ φ^(j)(P ∩ (Q + x)) dx` with its standard error.
 *
 * # Safety
 * Handles must be live and `mean`, `stderr` writable.
 */
enum TrStatus tr_translative_lhs_mc(const struct TrFamily *f,
                                    size_t j,
                                    const struct TrPolytope *p,
                                    const struct TrPolytope *q,
                                    size_t samples,
                                    uint64_t seed,
                                    double *mean,
                                    double *stderr);

/**
 * Union of `k` polytopes. Fails with `NOT_GENERAL_POSITION` when the parts
 * are not in mutual general position.
 *
 * # Safety
 * `parts` must hold `k` live handles and `out` be writable. The parts are
 * copied.
 */
enum TrStatus tr_union_new(const struct TrPolytope *const *parts, size_t k, struct TrUnion **out);

/**
 * # Safety
 * `u` must come from this library and not be used afterwards.
 */
void tr_union_free(struct TrUnion *u);

/**
 * `φ^(j)` of the union by inclusion-exclusion.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum TrStatus tr_union_phi(const struct TrFamily *f,
                           const struct TrUnion *u,
                           size_t j,
                           double *out);

/**
 * Signed vertex count and signed edge length of the union boundary.
 *
 * # Safety
 * `u` must be live and the out-pointers writable.
 */
enum TrStatus tr_union_boundary_features(const struct TrUnion *u,
                                         double *signed_vertices,
                                         double *signed_edge_length);

/**
 * Density `φ̄^(j)(Z)` of a Boolean model with intensity `gamma` and the
 * single grain `p`, rotated uniformly when `isotropic` is nonzero. Rotation
 * averages use `samples` draws from `seed`; `stderr` is their standard
 * error.
 *
 * # Safety
 * Handles must be live and `value`, `stderr` writable.
 */
enum TrStatus tr_boolean_density(const struct TrFamily *f,
                                 const struct TrPolytope *p,
                                 int32_t isotropic,
                                 double gamma,
                                 size_t j,
                                 size_t samples,
                                 uint64_t seed,
                                 double *value,
                                 double *stderr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRANSLATIVE_H */
