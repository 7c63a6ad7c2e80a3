#ifndef QSETS_H
#define QSETS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum QsStatus {
  QS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  QS_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  QS_STATUS_INVALID_UTF8 = 2,
  /**
   * JSON did not parse or did not match the schema.
   */
  QS_STATUS_PARSE = 3,
  /**
   * Well-formed but inconsistent input (shapes, labels, tolerances).
   */
  QS_STATUS_INVALID_INPUT = 4,
  /**
   * A mathematical precondition failed.
   */
  QS_STATUS_MATH = 5,
  /**
   * A search finished without a result.
   */
  QS_STATUS_NOT_FOUND = 6,
  /**
   * The library panicked; this is a bug.
   */
  QS_STATUS_PANIC = 7,
} QsStatus;

/**
 * Opaque family of projections indexed by vertex and color.
 */
typedef struct QsFamily QsFamily;

/**
 * Opaque simple graph.
 */
typedef struct QsGraph QsGraph;

/**
 * Opaque block operator on a quantum set.
 */
typedef struct QsOperator QsOperator;

/**
 * Opaque relation between quantum sets.
 */
typedef struct QsRelation QsRelation;

/**
 * Numerical tolerances; pass null to any function to use the defaults.
 */
typedef struct QsTolerance {
  double rank_cut;
  double eq_tol;
} QsTolerance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default tolerances (`rank_cut = 1e-10`, `eq_tol = 1e-8`).
 */
struct QsTolerance qs_tolerance_default(void);

/**
 * Message of the last failed call on this thread, or "" after a success.
 * The pointer stays valid until the next call into the library on this
 * thread.
 */
const char *qs_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void qs_string_free(char *s);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QsStatus qs_relation_from_json(const char *json, struct QsRelation **out);

/**
 * # Safety
 * `rel` must be a live handle; `out` must be writable. Free the result
 * with [`qs_string_free`].
 */
enum QsStatus qs_relation_to_json(const struct QsRelation *rel, char **out);

/**
 * # Safety
 * `rel` must be null or a live handle, which is invalid afterwards.
 */
void qs_relation_free(struct QsRelation *rel);

/**
 * `second ∘ first`: apply `first`, then `second`.
 *
 * # Safety
 * Handles must be live; `tol` may be null; `out` must be writable.
 */
enum QsStatus qs_relation_compose(const struct QsRelation *first,
                                  const struct QsRelation *second,
                                  const struct QsTolerance *tol,
                                  struct QsRelation **out);

/**
 * # Safety
 * `rel` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_relation_dagger(const struct QsRelation *rel, struct QsRelation **out);

/**
 * Projector distance between two parallel relations.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum QsStatus qs_relation_distance(const struct QsRelation *a,
                                   const struct QsRelation *b,
                                   double *out);

/**
 * Function axioms of a relation as a JSON witness with residuals.
 *
 * # Safety
 * `rel` must be a live handle; `tol` may be null; `out` must be writable.
 */
enum QsStatus qs_relation_check(const struct QsRelation *rel,
                                const struct QsTolerance *tol,
                                char **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QsStatus qs_operator_from_json(const char *json, struct QsOperator **out);

/**
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_operator_to_json(const struct QsOperator *op, char **out);

/**
 * # Safety
 * `op` must be null or a live handle, which is invalid afterwards.
 */
void qs_operator_free(struct QsOperator *op);

/**
 * Pulls `op` (on the target) back along the partial function `f`.
 *
 * # Safety
 * Handles must be live; `tol` may be null; `out` must be writable.
 */
enum QsStatus qs_star_map(const struct QsRelation *f,
                          const struct QsOperator *op,
                          const struct QsTolerance *tol,
                          struct QsOperator **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QsStatus qs_graph_from_json(const char *json, struct QsGraph **out);

/**
 * Complete graph on vertices "0", ..., "n-1".
 *
 * # Safety
 * `out` must be writable.
 */
enum QsStatus qs_graph_complete(size_t n, struct QsGraph **out);

/**
 * # Safety
 * `g` must be null or a live handle, which is invalid afterwards.
 */
void qs_graph_free(struct QsGraph *g);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QsStatus qs_family_from_json(const char *json, struct QsFamily **out);

/**
 * # Safety
 * `fam` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_family_to_json(const struct QsFamily *fam, char **out);

/**
 * # Safety
 * `fam` must be null or a live handle, which is invalid afterwards.
 */
void qs_family_free(struct QsFamily *fam);

/**
 * Checks a family against a graph. `pass` is true only when both the
 * projection route and the predicate route accept; `max_violation` is the
 * largest `‖p_gt p_ht‖` over edges. Either output may be null.
 *
 * # Safety
 * Handles must be live; `tol` may be null.
 */
enum QsStatus qs_coloring_verify(const struct QsGraph *graph,
                                 const struct QsFamily *fam,
                                 const struct QsTolerance *tol,
                                 bool *pass,
                                 double *max_violation);

/**
 * Searches for a family with `colors` colors (named "0", "1", ...) in
 * dimension `dim`. Returns `QS_STATUS_NOT_FOUND` when the budget runs
 * out, which does not prove that no family exists.
 *
 * # Safety
 * `graph` must be live; `tol` may be null; `out` must be writable.
 */
enum QsStatus qs_coloring_search(const struct QsGraph *graph,
                                 size_t colors,
                                 size_t dim,
                                 uint64_t seed,
                                 size_t restarts,
                                 size_t sweeps,
                                 const struct QsTolerance *tol,
                                 struct QsFamily **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSETS_H */
