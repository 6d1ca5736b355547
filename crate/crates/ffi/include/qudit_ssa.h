#ifndef QUDIT_SSA_H
#define QUDIT_SSA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum QssaStatus {
  QSSA_STATUS_OK = 0,
  QSSA_STATUS_NULL_POINTER = 1,
  QSSA_STATUS_INVALID_ARGUMENT = 2,
  QSSA_STATUS_NOT_NORMALIZED = 3,
  QSSA_STATUS_NEGATIVE_ENTRY = 4,
  QSSA_STATUS_NON_HERMITIAN = 5,
  QSSA_STATUS_TRACE_NOT_ONE = 6,
  QSSA_STATUS_NOT_POSITIVE = 7,
  QSSA_STATUS_DIMENSION_MISMATCH = 8,
  QSSA_STATUS_BAD_SHAPE = 9,
  QSSA_STATUS_BAD_AXES = 10,
  QSSA_STATUS_ARITY_MISMATCH = 11,
  QSSA_STATUS_UNSUPPORTED_SPIN = 12,
  QSSA_STATUS_PARSE_ERROR = 13,
  QSSA_STATUS_BUFFER_TOO_SMALL = 14,
  QSSA_STATUS_PANIC = 15,
} QssaStatus;

typedef struct QssaDensityMatrix QssaDensityMatrix;

typedef struct QssaGroupingSpec QssaGroupingSpec;

typedef struct QssaPlacement QssaPlacement;

typedef struct QssaProbabilityVector QssaProbabilityVector;

/**
 * Mirror of an inequality verdict; the check holds when
 * `gap >= -tolerance`.
 */
typedef struct QssaVerdict {
  double lhs;
  double rhs;
  double gap;
  bool holds;
  double tolerance;
} QssaVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *qssa_last_error_message(void);

/**
 * Validates `len` probabilities into a new vector handle.
 */
enum QssaStatus qssa_vector_new(const double *data, size_t len, struct QssaProbabilityVector **out);

/**
 * Uniform simplex sample for `(seed, stream)`.
 */
enum QssaStatus qssa_vector_sample(size_t n,
                                   uint64_t seed,
                                   uint64_t stream,
                                   struct QssaProbabilityVector **out);

void qssa_vector_free(struct QssaProbabilityVector *v);

size_t qssa_vector_len(const struct QssaProbabilityVector *v);

/**
 * Copies the components into `buffer` (capacity `len`).
 */
enum QssaStatus qssa_vector_read(const struct QssaProbabilityVector *v, double *buffer, size_t len);

enum QssaStatus qssa_vector_shannon_entropy(const struct QssaProbabilityVector *v, double *out);

/**
 * Validates an `n x n` row-major matrix. `im` may be null for a real
 * matrix.
 */
enum QssaStatus qssa_density_new(const double *re,
                                 const double *im,
                                 size_t n,
                                 struct QssaDensityMatrix **out);

/**
 * Ginibre sample of the given rank for `(seed, stream)`.
 */
enum QssaStatus qssa_density_sample(size_t n,
                                    size_t rank,
                                    uint64_t seed,
                                    uint64_t stream,
                                    struct QssaDensityMatrix **out);

void qssa_density_free(struct QssaDensityMatrix *rho);

size_t qssa_density_dim(const struct QssaDensityMatrix *rho);

/**
 * Copies the matrix row-major into `re`/`im` (each of capacity
 * `capacity >= n*n`).
 */
enum QssaStatus qssa_density_read(const struct QssaDensityMatrix *rho,
                                  double *re,
                                  double *im,
                                  size_t capacity);

enum QssaStatus qssa_density_von_neumann_entropy(const struct QssaDensityMatrix *rho, double *out);

/**
 * Lexicographic placement of `n` components into a lattice with `axes`
 * dimensions taken from `shape`.
 */
enum QssaStatus qssa_placement_lex(size_t n,
                                   const size_t *shape,
                                   size_t axes,
                                   struct QssaPlacement **out);

/**
 * Parses the placement JSON format (`{"shape": [...], "assignment": [...]}`,
 * 1-based cells).
 */
enum QssaStatus qssa_placement_from_json(const char *json, struct QssaPlacement **out);

/**
 * Permutes a placement: component `k` takes the cell of `sigma[k]`
 * (0-based).
 */
enum QssaStatus qssa_placement_permuted(const struct QssaPlacement *base,
                                        const size_t *sigma,
                                        size_t len,
                                        struct QssaPlacement **out);

void qssa_placement_free(struct QssaPlacement *p);

/**
 * Partial trace of the embedded state onto the (0-based) `keep` axes.
 * Writes the reduced dimension to `out_dim` and the matrix row-major to
 * `re`/`im` when `capacity` suffices.
 */
enum QssaStatus qssa_partial_trace(const struct QssaDensityMatrix *rho,
                                   const struct QssaPlacement *placement,
                                   const size_t *keep,
                                   size_t keep_len,
                                   double *re,
                                   double *im,
                                   size_t capacity,
                                   size_t *out_dim);

/**
 * Subadditivity (2-axis placement) or strong subadditivity (3-axis) of a
 * probability vector.
 */
enum QssaStatus qssa_check_classical(const struct QssaProbabilityVector *v,
                                     const struct QssaPlacement *placement,
                                     struct QssaVerdict *out);

/**
 * Quantum counterpart of [`qssa_check_classical`].
 */
enum QssaStatus qssa_check_quantum(const struct QssaDensityMatrix *rho,
                                   const struct QssaPlacement *placement,
                                   struct QssaVerdict *out);

/**
 * Parses a grouping spec (`{"n": N, "lhs": [...], "rhs": [...]}`).
 */
enum QssaStatus qssa_grouping_from_json(const char *json, struct QssaGroupingSpec **out);

/**
 * One of the bundled specs by name, e.g. `"eq12"`.
 */
enum QssaStatus qssa_grouping_bundled(const char *name, struct QssaGroupingSpec **out);

void qssa_grouping_free(struct QssaGroupingSpec *spec);

enum QssaStatus qssa_evaluate_grouping(const struct QssaProbabilityVector *v,
                                       const struct QssaGroupingSpec *spec,
                                       double tolerance,
                                       struct QssaVerdict *out);

/**
 * Spin tomogram of `rho` along `(theta, phi)`, written to `w` (capacity
 * `len >= dim`) in ascending `m`.
 */
enum QssaStatus qssa_tomogram(const struct QssaDensityMatrix *rho,
                              double theta,
                              double phi,
                              double *w,
                              size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUDIT_SSA_H */
