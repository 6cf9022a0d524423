#ifndef LIRGOMAX_H
#define LIRGOMAX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum LrgStatus {
  LRG_STATUS_OK = 0,
  /**
   * Null pointer, bad length, out-of-range node or parameter.
   */
  LRG_STATUS_INVALID_ARGUMENT = 1,
  LRG_STATUS_IO = 2,
  LRG_STATUS_PARSE = 3,
  /**
   * An iteration hit its limit, or a finite-strength normalization failed.
   */
  LRG_STATUS_NOT_CONVERGED = 4,
  /**
   * The problem is too large for a dense step.
   */
  LRG_STATUS_GUARD_EXCEEDED = 5,
  LRG_STATUS_SINGULAR = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  LRG_STATUS_PANIC = 7,
} LrgStatus;

/**
 * Opaque graph handle.
 */
typedef struct LrgGraph LrgGraph;

/**
 * Solver settings shared by all computations.
 */
typedef struct LrgOptions {
  /**
   * Damping factor in (0, 1].
   */
  double alpha;
  /**
   * L1 stopping tolerance between successive iterates.
   */
  double tol;
  size_t max_iter;
  /**
   * Serial reductions, bit-identical across runs.
   */
  bool deterministic;
} LrgOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default solver settings: alpha 0.85, tol 1e-12, 1000 iterations,
 * deterministic.
 */
struct LrgOptions lrg_options_default(void);

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *lrg_last_error(void);

/**
 * Library version, static string.
 */
const char *lrg_version(void);

/**
 * Loads an edge list file. On success `*out` owns a new graph that must be
 * released with [`lrg_graph_free`].
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LrgStatus lrg_graph_load(const char *path, bool drop_self_loops, struct LrgGraph **out);

/**
 * Builds a graph from parallel `sources` / `targets` arrays.
 *
 * # Safety
 * Both arrays must hold `n_edges` values; `out` must be valid.
 */
enum LrgStatus lrg_graph_from_edges(size_t n_nodes,
                                    const uint32_t *sources,
                                    const uint32_t *targets,
                                    size_t n_edges,
                                    bool drop_self_loops,
                                    struct LrgGraph **out);

/**
 * Releases a graph. Null is accepted.
 *
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void lrg_graph_free(struct LrgGraph *g);

/**
 * Node count, 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t lrg_graph_n_nodes(const struct LrgGraph *g);

/**
 * Edge count after deduplication, 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t lrg_graph_n_edges(const struct LrgGraph *g);

/**
 * PageRank (or CheiRank when `transposed`) into `out[0..n]`.
 * `opts` may be null for defaults; `iterations` may be null.
 *
 * # Safety
 * `out` must hold `out_len` doubles.
 */
enum LrgStatus lrg_pagerank(const struct LrgGraph *g,
                            const struct LrgOptions *opts,
                            bool transposed,
                            double *out,
                            size_t out_len,
                            size_t *iterations);

/**
 * Linear response `P1` to injection at `inject` and absorption at `absorb`
 * (balanced pair), into `p1[0..n]`.
 *
 * # Safety
 * `p1` must hold `p1_len` doubles.
 */
enum LrgStatus lrg_linres_pump(const struct LrgGraph *g,
                               const struct LrgOptions *opts,
                               size_t inject,
                               size_t absorb,
                               double *p1,
                               size_t p1_len);

/**
 * Response `P1` to amplifying the transition `source -> target`, and the
 * relative sensitivities `P1 / P0`. `sensitivity` may be null.
 *
 * # Safety
 * `p1` and a non-null `sensitivity` must each hold `len` doubles.
 */
enum LrgStatus lrg_linres_sensitivity(const struct LrgGraph *g,
                                      const struct LrgOptions *opts,
                                      size_t target,
                                      size_t source,
                                      double *p1,
                                      double *sensitivity,
                                      size_t len);

/**
 * Reduced Google matrix of `subset[0..n_r]` and its components, each
 * written row-major into an `n_r * n_r` buffer (`matrix_len` values each).
 * `gr` is required; `grr`, `gpr`, `gqr` and `lambda_c` may be null.
 * `lambda_c` receives the leading eigenvalue of the complement block, or
 * NaN when the subset is the whole graph.
 *
 * # Safety
 * `subset` must hold `n_r` ids; every non-null matrix buffer must hold
 * `matrix_len` doubles.
 */
enum LrgStatus lrg_regomax(const struct LrgGraph *g,
                           const struct LrgOptions *opts,
                           const size_t *subset,
                           size_t n_r,
                           double *gr,
                           double *grr,
                           double *gpr,
                           double *gqr,
                           size_t matrix_len,
                           double *lambda_c);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIRGOMAX_H */
