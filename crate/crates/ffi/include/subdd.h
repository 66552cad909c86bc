#ifndef SUBDD_H
#define SUBDD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Values 2, 3 and 4 match the exit codes of the command-line tool.
 */
typedef enum SubddStatus {
  SUBDD_STATUS_OK = 0,
  SUBDD_STATUS_NULL_POINTER = 1,
  SUBDD_STATUS_INVALID_CONFIG = 2,
  SUBDD_STATUS_DIVERGED = 3,
  SUBDD_STATUS_SIZE_CAP = 4,
  SUBDD_STATUS_DIMENSION_MISMATCH = 5,
  SUBDD_STATUS_NUMERICAL = 6,
  SUBDD_STATUS_PANIC = 7,
} SubddStatus;

/**
 * Opaque handle to an assembled problem.
 */
typedef struct SubddContext SubddContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty after a success).
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *subdd_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *subdd_version(void);

/**
 * Builds a context from configuration text.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` valid for one pointer write.
 */
enum SubddStatus subdd_context_new(const char *config, struct SubddContext **out);

/**
 * Releases a context. Null is ignored.
 *
 * # Safety
 * `ctx` must be null or a pointer from [`subdd_context_new`] not yet freed.
 */
void subdd_context_free(struct SubddContext *ctx);

/**
 * Length `N^s` of interface vectors (`[Γ2; Γ1]`).
 *
 * # Safety
 * `ctx` from [`subdd_context_new`]; `out` valid for one write.
 */
enum SubddStatus subdd_interface_size(const struct SubddContext *ctx, size_t *out);

/**
 * `out = G v`, one application of the one-level smoother.
 *
 * # Safety
 * `v` and `out` must hold `len` doubles each.
 */
enum SubddStatus subdd_apply_g(const struct SubddContext *ctx,
                               const double *v,
                               double *out,
                               size_t len);

/**
 * Right-hand side `b` of the substructured system `(I - G) v = b`.
 *
 * # Safety
 * `out` must hold `len` doubles.
 */
enum SubddStatus subdd_rhs(const struct SubddContext *ctx, double *out, size_t len);

/**
 * Solves with the configured method from a zero initial guess.
 *
 * Writes the final interface iterate, the number of cycles and the last
 * relative error. Returns `DIVERGED` (with outputs written) if the
 * iteration diverged, `NUMERICAL` if it hit `maxit` without converging.
 *
 * # Safety
 * `solution` must hold `len` doubles; `iterations` and `rel_error` may be null.
 */
enum SubddStatus subdd_solve(const struct SubddContext *ctx,
                             double *solution,
                             size_t len,
                             size_t *iterations,
                             double *rel_error);

/**
 * Spectral radius of the configured iteration: the two-level operator, or
 * `G` itself for `psm` and `gmls`.
 *
 * # Safety
 * `out` valid for one write.
 */
enum SubddStatus subdd_spectral_radius(const struct SubddContext *ctx, double *out);

/**
 * `sinh(kπ(L_j - δ)/L̃) / sinh(kπ(L_j + δ)/L̃)`.
 *
 * # Safety
 * `out` valid for one write.
 */
enum SubddStatus subdd_rho_rectangle(size_t k,
                                     double l_j,
                                     double delta,
                                     double l_tilde,
                                     double *out);

/**
 * Discrete counterpart of [`subdd_rho_rectangle`] for the 5-point stencil.
 */
double subdd_rho_discrete(size_t k, size_t n, size_t own, size_t opposite);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBDD_H */
