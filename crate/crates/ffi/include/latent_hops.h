#ifndef LATENT_HOPS_H
#define LATENT_HOPS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Hop count reported for disconnected pairs.
 */
#define LH_INF_HOPS 65535

typedef enum LhStatus {
  LH_STATUS_OK = 0,
  LH_STATUS_NULL_POINTER = 1,
  LH_STATUS_INVALID_ARGUMENT = 2,
  LH_STATUS_SIZE_MISMATCH = 3,
  LH_STATUS_DISCONNECTED = 4,
  LH_STATUS_NO_POSITIVE_SPECTRUM = 5,
  LH_STATUS_IO = 6,
  LH_STATUS_PANIC = 7,
} LhStatus;

typedef struct LhGraph LhGraph;

typedef struct LhHops LhHops;

typedef struct LhPoints LhPoints;

/**
 * Outcome of the indicator-link bound `0 ≤ d̂ − d ≤ 4(ε/r)d + r`.
 */
typedef struct LhBoundSummary {
  size_t connected_pairs;
  size_t lower_violations;
  size_t upper_violations;
  /**
   * 1 when `ε ≤ r/4`, the condition under which the upper bound is promised.
   */
  int32_t hypothesis_met;
  double max_residual;
  double max_relative_error;
} LhBoundSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message (NUL-terminated, truncated
 * to `len`) and returns its full length in bytes, excluding the terminator.
 */
size_t lh_last_error(char *buf, size_t len);

/**
 * Samples `n` points uniformly from `[0,width]×[0,height]`.
 */
enum LhStatus lh_points_sample_rectangle(double width,
                                         double height,
                                         size_t n,
                                         uint64_t seed,
                                         struct LhPoints **out);

/**
 * Wraps `n` row-major points of dimension 1 or 2; the domain is their
 * bounding box.
 */
enum LhStatus lh_points_from_coords(const double *data,
                                    size_t n,
                                    size_t dim,
                                    struct LhPoints **out);

size_t lh_points_len(const struct LhPoints *p);

size_t lh_points_dim(const struct LhPoints *p);

/**
 * Copies the coordinates row-major into `out` (`len ≥ n·dim`).
 */
enum LhStatus lh_points_copy(const struct LhPoints *p, double *out, size_t len);

void lh_points_free(struct LhPoints *p);

/**
 * Random geometric graph with the indicator link `1{d ≤ r}`.
 */
enum LhStatus lh_graph_indicator(const struct LhPoints *p,
                                 double r,
                                 uint64_t seed,
                                 struct LhGraph **out);

/**
 * Symmetrized `kappa`-nearest-neighbour graph; `mutual != 0` keeps only
 * reciprocated edges, otherwise either direction suffices.
 */
enum LhStatus lh_graph_knn(const struct LhPoints *p,
                           size_t kappa,
                           int32_t mutual,
                           struct LhGraph **out);

size_t lh_graph_edge_count(const struct LhGraph *g);

/**
 * 1 if connected, 0 if not or if `g` is null.
 */
int32_t lh_graph_is_connected(const struct LhGraph *g);

void lh_graph_free(struct LhGraph *g);

enum LhStatus lh_hops_compute(const struct LhGraph *g, struct LhHops **out);

size_t lh_hops_len(const struct LhHops *h);

/**
 * Hop count between `i` and `j`; `LH_INF_HOPS` when disconnected or out of range.
 */
uint16_t lh_hops_get(const struct LhHops *h, size_t i, size_t j);

/**
 * Writes the `n×n` estimates `r·hops` row-major; disconnected pairs are `+inf`.
 */
enum LhStatus lh_hops_estimates(const struct LhHops *h, double r, double *out, size_t len);

void lh_hops_free(struct LhHops *h);

/**
 * Classical scaling of `r·hops` into `dim` dimensions; writes `n·dim`
 * row-major coordinates. Fails with `Disconnected` if any pair is unreachable.
 */
enum LhStatus lh_classical_mds(const struct LhHops *h,
                               double r,
                               size_t dim,
                               double *out,
                               size_t len);

/**
 * Checks `r·hops` against the points' true distances with coverage radius `eps`.
 */
enum LhStatus lh_check_simple_bound(const struct LhPoints *p,
                                    const struct LhHops *h,
                                    double eps,
                                    double r,
                                    struct LhBoundSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LATENT_HOPS_H */
