#ifndef QUASIMETRIC_H
#define QUASIMETRIC_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. `QM_STATUS_OK` is zero.
 */
typedef enum {
  QM_STATUS_OK = 0,
  QM_STATUS_NULL_POINTER = 1,
  QM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The matrix fails an axiom; the message names the witness.
   */
  QM_STATUS_INVALID_SPACE = 3,
  QM_STATUS_NOT_WEIGHTABLE = 4,
  /**
   * `|w(x) - w(y)| / 2 <= rho(x, y)` fails.
   */
  QM_STATUS_LIPSCHITZ = 5,
  QM_STATUS_INDEX_OUT_OF_RANGE = 6,
  QM_STATUS_DOMAIN = 7,
  QM_STATUS_NOT_POSITIVE = 8,
  QM_STATUS_PARSE = 9,
  QM_STATUS_IO = 10,
  /**
   * The caller's buffer is too small.
   */
  QM_STATUS_BUFFER_TOO_SMALL = 11,
  /**
   * A Rust panic was caught at the boundary.
   */
  QM_STATUS_PANIC = 12,
} QmStatus;

typedef enum {
  /**
   * Distances from the source.
   */
  QM_DIRECTION_FORWARD = 0,
  /**
   * Distances to the source.
   */
  QM_DIRECTION_BACKWARD = 1,
} QmDirection;

/**
 * Single-source distances over the active nodes of a graph. Opaque.
 */
typedef struct QmDistanceField QmDistanceField;

/**
 * A Randers structure on a grid together with its stencil graph. Opaque.
 */
typedef struct QmRandersGraph QmRandersGraph;

/**
 * A validated quasi-metric space. Opaque.
 */
typedef struct QmSpace QmSpace;

/**
 * A weighted quasi-metric space. Opaque.
 */
typedef struct QmWeighted QmWeighted;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the grid graph described by a JSON scenario, e.g.
 * `{"domain": {"bbox": [0, 1, 0, 1], "resolution": 101},
 *   "metric": "euclidean", "one_form": "potential:linear(0.5,0)"}`.
 * Only the domain, metric, one-form, stencil and positivity margin are
 * used.
 *
 * # Safety
 * `scenario_json` must be a NUL-terminated string; `out_graph` writable.
 */
QmStatus qm_randers_graph_new(const char *scenario_json, QmRandersGraph **out_graph);

/**
 * Frees a graph. Null is ignored.
 *
 * # Safety
 * `graph` must come from this library and not be used afterwards.
 */
void qm_randers_graph_free(QmRandersGraph *graph);

/**
 * Number of active grid nodes, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t qm_randers_graph_node_count(const QmRandersGraph *graph);

/**
 * Nearest active node to `(x, y)`.
 *
 * # Safety
 * `graph` must be a live handle and `out_node` writable.
 */
QmStatus qm_randers_graph_nearest_node(const QmRandersGraph *graph,
                                       double x,
                                       double y,
                                       size_t *out_node);

/**
 * Coordinates of an active node.
 *
 * # Safety
 * `graph` must be a live handle; outputs writable.
 */
QmStatus qm_randers_graph_node_coords(const QmRandersGraph *graph,
                                      size_t node,
                                      double *out_x,
                                      double *out_y);

/**
 * Runs Dijkstra from `source`. `direction` is a [`QmDirection`] value,
 * passed as an integer so that out-of-range values are rejected rather
 * than undefined.
 *
 * # Safety
 * `graph` must be a live handle and `out_field` writable.
 */
QmStatus qm_distance_field_new(const QmRandersGraph *graph,
                               size_t source,
                               uint32_t direction,
                               QmDistanceField **out_field);

/**
 * Frees a distance field. Null is ignored.
 *
 * # Safety
 * `field` must come from this library and not be used afterwards.
 */
void qm_distance_field_free(QmDistanceField *field);

/**
 * Number of values (active nodes), or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t qm_distance_field_len(const QmDistanceField *field);

/**
 * Number of nodes the source cannot reach (their value is infinite).
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t qm_distance_field_unreachable(const QmDistanceField *field);

/**
 * Copies all values into `out_values`.
 *
 * # Safety
 * `field` must be a live handle; `out_values` must hold `len` doubles.
 */
QmStatus qm_distance_field_values(const QmDistanceField *field, double *out_values, size_t len);

/**
 * Value at one node.
 *
 * # Safety
 * `field` must be a live handle and `out_value` writable.
 */
QmStatus qm_distance_field_value(const QmDistanceField *field, size_t node, double *out_value);

/**
 * Default margin for the `|b|_alpha < 1` test.
 */
double qm_default_positivity_margin(void);

/**
 * Validates the row-major `n x n` matrix `data` and returns a new space in
 * `*out`. `tol` is the base tolerance (1e-9 is the usual choice).
 *
 * # Safety
 * `data` must point to `n * n` doubles; `out` must be writable.
 */
QmStatus qm_space_new(const double *data,
                      size_t n,
                      double tol,
                      bool weak_separation,
                      QmSpace **out_space);

/**
 * Frees a space. Null is ignored.
 *
 * # Safety
 * `space` must come from this library and not be used afterwards.
 */
void qm_space_free(QmSpace *space);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `space` must be null or a live handle.
 */
size_t qm_space_size(const QmSpace *space);

/**
 * `*out = d(i, j)`.
 *
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
QmStatus qm_space_distance(const QmSpace *space, size_t i, size_t j, double *out_value);

/**
 * Perimeter-identity test. Writes whether the space is weightable and the
 * largest perimeter gap.
 *
 * # Safety
 * `space` must be a live handle; outputs must be writable.
 */
QmStatus qm_space_is_weightable(const QmSpace *space,
                                double tol,
                                bool *out_weightable,
                                double *out_residual);

/**
 * Recovers the weight from `basepoint`, shifted so its minimum is zero,
 * into `out_weight[0..n]`. Fails with `QM_STATUS_NOT_WEIGHTABLE` when the
 * perimeter identity fails.
 *
 * # Safety
 * `space` must be a live handle; `out_weight` must hold `len` doubles.
 */
QmStatus qm_space_recover_weight(const QmSpace *space,
                                 size_t basepoint,
                                 double tol,
                                 double *out_weight,
                                 size_t len);

/**
 * Forward, backward and max quasi-Hausdorff distances between the index
 * sets `a` and `b`. Any output pointer may be null.
 *
 * # Safety
 * `space` must be a live handle; `a` and `b` must hold `a_len` and `b_len`
 * indices.
 */
QmStatus qm_quasi_hausdorff(const QmSpace *space,
                            const size_t *a,
                            size_t a_len,
                            const size_t *b,
                            size_t b_len,
                            double *out_forward,
                            double *out_backward,
                            double *out_max);

/**
 * Forward Hausdorff distance between the sets `E(x)` and `E(y)` in the
 * height bundle; equals `d(x, y)`.
 *
 * # Safety
 * `space` must be a live handle and `out_value` writable.
 */
QmStatus qm_e_embedding_distance(const QmSpace *space, size_t x, size_t y, double *out_value);

/**
 * Builds `d(x, y) = rho(x, y) + (w(y) - w(x)) / 2` from a symmetric
 * row-major `n x n` metric and an `n`-vector weight.
 *
 * # Safety
 * `rho` must hold `n * n` doubles, `weight` `n` doubles; `out` writable.
 */
QmStatus qm_weighted_compose(const double *rho,
                             const double *weight,
                             size_t n,
                             double tol,
                             QmWeighted **out_weighted);

/**
 * Frees a weighted space. Null is ignored.
 *
 * # Safety
 * `weighted` must come from this library and not be used afterwards.
 */
void qm_weighted_free(QmWeighted *weighted);

/**
 * Copies the composed row-major distance matrix into `out_matrix`.
 *
 * # Safety
 * `weighted` must be a live handle; `out_matrix` must hold `len` doubles.
 */
QmStatus qm_weighted_matrix(const QmWeighted *weighted, double *out_matrix, size_t len);

/**
 * Largest deviation of the bundle embedding `x -> (x, w(x) / 2)` from an
 * isometry.
 *
 * # Safety
 * `weighted` must be a live handle and `out_residual` writable.
 */
QmStatus qm_weighted_embedding_residual(const QmWeighted *weighted,
                                        double tol,
                                        double *out_residual);

/**
 * Wraps an existing weighted space's distances as a plain space handle.
 *
 * # Safety
 * `weighted` must be a live handle and `out_space` writable.
 */
QmStatus qm_weighted_space(const QmWeighted *weighted, QmSpace **out_space);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len - 1` bytes) and returns the full message
 * length in bytes, excluding the terminator. Pass a null `buf` to query the
 * length. An empty message means the last call succeeded.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t qm_last_error_message(char *buf, size_t len);

/**
 * Static NUL-terminated version string.
 */
const char *qm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUASIMETRIC_H */
