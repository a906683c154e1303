#ifndef BACKBONE_H
#define BACKBONE_H

/* Generated from the Rust sources; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum {
  BB_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BB_STATUS_NULL_ARG = 1,
  /**
   * Arguments failed validation (bad dimensions, labels, parameters).
   */
  BB_STATUS_INVALID_INPUT = 2,
  /**
   * Reading or writing a file failed.
   */
  BB_STATUS_IO = 3,
  /**
   * An iterative solver did not reach its tolerance.
   */
  BB_STATUS_NO_CONVERGENCE = 4,
  /**
   * A label does not occur in the graph or backbone.
   */
  BB_STATUS_UNKNOWN_LABEL = 5,
  /**
   * A string argument was not valid UTF-8.
   */
  BB_STATUS_UTF8 = 6,
  /**
   * An internal invariant failed; the operation was aborted safely.
   */
  BB_STATUS_PANIC = 7,
} BbStatus;

/**
 * SDSM probability matrix construction.
 */
typedef enum {
  BB_METHOD_RATIO = 0,
  BB_METHOD_POLYTOPE = 1,
} BbMethod;

/**
 * Familywise error rate correction.
 */
typedef enum {
  BB_FWER_NONE = 0,
  BB_FWER_BONFERRONI = 1,
  BB_FWER_HOLM = 2,
} BbFwer;

/**
 * Backbone serialization format.
 */
typedef enum {
  BB_FORMAT_MATRIX_CSV = 0,
  BB_FORMAT_SIGNED_EDGELIST = 1,
  BB_FORMAT_DOT = 2,
} BbFormat;

/**
 * An extracted backbone with signed or binary entries.
 */
typedef struct BbBackbone BbBackbone;

/**
 * A labeled binary bipartite graph (agents x artifacts).
 */
typedef struct BbGraph BbGraph;

/**
 * Per-edge tail probabilities produced by a null model.
 */
typedef struct BbResult BbResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Never null; empty
 * before any failure. The pointer is invalidated by the next failing call.
 */
const char *bb_last_error_message(void);

/**
 * Read a biadjacency matrix CSV (column labels in the first row, row
 * labels in the first column, cells 0/1).
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` a valid out pointer.
 */
BbStatus bb_graph_read_csv(const char *path, BbGraph **out);

/**
 * Read a two-column agent,artifact edgelist CSV.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` a valid out pointer.
 */
BbStatus bb_graph_read_edgelist(const char *path, BbGraph **out);

/**
 * Build a graph from a row-major `rows * cols` array of 0/1 entries.
 * Label arrays may be null, in which case labels r0..r{rows-1} and
 * c0..c{cols-1} are generated.
 *
 * # Safety
 * `entries` must point to `rows * cols` bytes; non-null label arrays must
 * hold `rows` (respectively `cols`) valid NUL-terminated strings.
 */
BbStatus bb_graph_new(size_t rows,
                      size_t cols,
                      const uint8_t *entries,
                      const char *const *row_labels,
                      const char *const *col_labels,
                      BbGraph **out);

/**
 * # Safety
 * `g` must be a pointer returned by a `bb_graph_*` constructor, or null.
 */
void bb_graph_free(BbGraph *g);

/**
 * Number of agents; 0 when `g` is null.
 *
 * # Safety
 * `g` must be a valid handle or null.
 */
size_t bb_graph_rows(const BbGraph *g);

/**
 * Number of artifacts; 0 when `g` is null.
 *
 * # Safety
 * `g` must be a valid handle or null.
 */
size_t bb_graph_cols(const BbGraph *g);

/**
 * Fill `buf` (length `len` >= rows*rows) with the row-major weighted
 * projection of `g`.
 *
 * # Safety
 * `g` must be a valid handle; `buf` must point to `len` writable u32.
 */
BbStatus bb_graph_project_into(const BbGraph *g, uint32_t *buf, size_t len);

/**
 * Hypergeometric null model.
 *
 * # Safety
 * `g` must be a valid handle; `out` a valid out pointer.
 */
BbStatus bb_hyperg(const BbGraph *g, BbResult **out);

/**
 * Stochastic degree sequence model.
 *
 * # Safety
 * `g` must be a valid handle; `out` a valid out pointer.
 */
BbStatus bb_sdsm(const BbGraph *g, BbMethod method, BbResult **out);

/**
 * Fixed degree sequence model. `trades` is the number of curveball trades
 * between samples, 0 for the default of 5 * rows; `restart` restarts the
 * chain from the observed graph for every sample.
 *
 * # Safety
 * `g` must be a valid handle; `out` a valid out pointer.
 */
BbStatus bb_fdsm(const BbGraph *g,
                 size_t trials,
                 uint64_t seed,
                 uint64_t trades,
                 bool restart,
                 BbResult **out);

/**
 * # Safety
 * `r` must be a pointer returned by a model call, or null.
 */
void bb_result_free(BbResult *r);

/**
 * Number of agents in the result; 0 when `r` is null.
 *
 * # Safety
 * `r` must be a valid handle or null.
 */
size_t bb_result_size(const BbResult *r);

/**
 * P(G*_ij >= G_ij) for the pair (i, j).
 *
 * # Safety
 * `r` must be a valid handle; `out` must point to a writable double.
 */
BbStatus bb_result_positive(const BbResult *r, size_t i, size_t j, double *out);

/**
 * P(G*_ij <= G_ij) for the pair (i, j).
 *
 * # Safety
 * `r` must be a valid handle; `out` must point to a writable double.
 */
BbStatus bb_result_negative(const BbResult *r, size_t i, size_t j, double *out);

/**
 * Persist a result as `<prefix>.positive.csv`, `<prefix>.negative.csv` and
 * `<prefix>.summary.json`.
 *
 * # Safety
 * `r` must be a valid handle; `prefix` a valid NUL-terminated string.
 */
BbStatus bb_result_write(const BbResult *r, const char *prefix);

/**
 * Load a result persisted by `bb_result_write`.
 *
 * # Safety
 * `prefix` must be a valid NUL-terminated string; `out` a valid out pointer.
 */
BbStatus bb_result_read(const char *prefix, BbResult **out);

/**
 * Two-tailed backbone extraction at significance level `alpha`.
 *
 * # Safety
 * `r` must be a valid handle; `out` a valid out pointer.
 */
BbStatus bb_extract(const BbResult *r, double alpha, bool signed_, BbFwer fwer, BbBackbone **out);

/**
 * Universal-threshold backbone of the weighted projection of `g`. `upper`
 * is a number or an expression such as "mean+1sd" or "q0.9"; a non-null
 * `lower` makes the backbone signed.
 *
 * # Safety
 * `g` must be a valid handle; `upper` a valid NUL-terminated string;
 * `lower` null or a valid NUL-terminated string; `out` a valid out pointer.
 */
BbStatus bb_universal(const BbGraph *g, const char *upper, const char *lower, BbBackbone **out);

/**
 * # Safety
 * `b` must be a pointer returned by an extraction call, or null.
 */
void bb_backbone_free(BbBackbone *b);

/**
 * Number of nodes; 0 when `b` is null.
 *
 * # Safety
 * `b` must be a valid handle or null.
 */
size_t bb_backbone_size(const BbBackbone *b);

/**
 * Entry in {-1, 0, 1}; 0 when `b` is null or the indices are out of range.
 *
 * # Safety
 * `b` must be a valid handle or null.
 */
int8_t bb_backbone_entry(const BbBackbone *b, size_t i, size_t j);

/**
 * Node label; null when `b` is null or `i` is out of range. The pointer
 * stays valid until the handle is freed.
 *
 * # Safety
 * `b` must be a valid handle or null.
 */
const char *bb_backbone_label(const BbBackbone *b, size_t i);

/**
 * Count of positive edges.
 *
 * # Safety
 * `b` must be a valid handle or null.
 */
size_t bb_backbone_positive_edges(const BbBackbone *b);

/**
 * Write the backbone in the chosen format.
 *
 * # Safety
 * `b` must be a valid handle; `path` a valid NUL-terminated string.
 */
BbStatus bb_backbone_write(const BbBackbone *b, const char *path, BbFormat format);

/**
 * Positive edge count over the number of unordered pairs.
 *
 * # Safety
 * `b` must be a valid handle; `out` must point to a writable double.
 */
BbStatus bb_backbone_density(const BbBackbone *b, double *out);

/**
 * Pearson correlation of the two backbones' upper-triangle entries,
 * aligned by node label.
 *
 * # Safety
 * `a` and `b` must be valid handles; `out` must point to a writable double.
 */
BbStatus bb_backbone_correlation(const BbBackbone *a, const BbBackbone *b, double *out);

/**
 * Newman-Girvan modularity of the positive subgraph under the partition
 * given as `len` parallel (label, community) string pairs.
 *
 * # Safety
 * `b` must be a valid handle; `labels` and `communities` must each point
 * to `len` valid NUL-terminated strings; `out` must point to a writable
 * double.
 */
BbStatus bb_backbone_modularity(const BbBackbone *b,
                                const char *const *labels,
                                const char *const *communities,
                                size_t len,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BACKBONE_H */
