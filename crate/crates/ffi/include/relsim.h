#ifndef RELSIM_H
#define RELSIM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RelsimStatus {
  RELSIM_STATUS_OK = 0,
  RELSIM_STATUS_NULL_POINTER = 1,
  RELSIM_STATUS_INVALID_UTF8 = 2,
  RELSIM_STATUS_PARSE_ERROR = 3,
  RELSIM_STATUS_INVALID_ARGUMENT = 4,
  RELSIM_STATUS_COMPUTE_ERROR = 5,
  RELSIM_STATUS_BUFFER_TOO_SMALL = 6,
  RELSIM_STATUS_PANIC = 7,
} RelsimStatus;

typedef enum RelsimLinkage {
  RELSIM_LINKAGE_AVERAGE = 0,
  RELSIM_LINKAGE_COMPLETE = 1,
  RELSIM_LINKAGE_SINGLE = 2,
} RelsimLinkage;

typedef enum RelsimAffinity {
  RELSIM_AFFINITY_ONE_MINUS = 0,
  RELSIM_AFFINITY_GAUSSIAN = 1,
} RelsimAffinity;

/**
 * A parsed dataset.
 */
typedef struct RelsimDataset RelsimDataset;

/**
 * A symmetric distance matrix with its row ids.
 */
typedef struct RelsimMatrix RelsimMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *relsim_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *relsim_version(void);

/**
 * Parses a dataset in the line format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RelsimStatus relsim_dataset_parse(const char *text, struct RelsimDataset **out);

/**
 * # Safety
 * `ds` must come from `relsim_dataset_parse` and not be freed twice.
 */
void relsim_dataset_free(struct RelsimDataset *ds);

/**
 * Number of target vertices, 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a live dataset handle.
 */
size_t relsim_dataset_target_count(const struct RelsimDataset *ds);

/**
 * Pairwise distances over the dataset's targets. `weights` points to five
 * values (ad, nad, cd, nd, ed) summing to 1. `workers` = 0 uses the
 * default thread pool.
 *
 * # Safety
 * `ds` must be a live dataset, `weights` must point to 5 doubles and `out`
 * must be a valid pointer.
 */
enum RelsimStatus relsim_distances(const struct RelsimDataset *ds,
                                   const double *weights,
                                   size_t depth,
                                   size_t workers,
                                   struct RelsimMatrix **out);

/**
 * Parses a matrix file (header of ids, then comma-separated rows).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RelsimStatus relsim_matrix_parse(const char *text, struct RelsimMatrix **out);

/**
 * # Safety
 * `m` must come from this library and not be freed twice.
 */
void relsim_matrix_free(struct RelsimMatrix *m);

/**
 * Matrix dimension, 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live matrix handle.
 */
size_t relsim_matrix_dim(const struct RelsimMatrix *m);

/**
 * Id of row `i`, or null when out of range. Owned by the matrix.
 *
 * # Safety
 * `m` must be null or a live matrix handle.
 */
const char *relsim_matrix_id(const struct RelsimMatrix *m, size_t i);

/**
 * # Safety
 * `m` must be a live matrix handle and `out` a valid pointer.
 */
enum RelsimStatus relsim_matrix_get(const struct RelsimMatrix *m, size_t i, size_t j, double *out);

/**
 * Copies the matrix row-major into `buf`, which holds `len` doubles.
 *
 * # Safety
 * `m` must be a live matrix handle and `buf` must hold `len` doubles.
 */
enum RelsimStatus relsim_matrix_copy(const struct RelsimMatrix *m, double *buf, size_t len);

/**
 * Agglomerative clustering into `k` clusters; writes one label per row.
 *
 * # Safety
 * `m` must be a live matrix handle and `labels` must hold `len` values.
 */
enum RelsimStatus relsim_cluster_agglomerative(const struct RelsimMatrix *m,
                                               size_t k,
                                               enum RelsimLinkage linkage,
                                               size_t *labels,
                                               size_t len);

/**
 * Spectral clustering into `k` clusters. `sigma` is read only for the
 * gaussian affinity.
 *
 * # Safety
 * `m` must be a live matrix handle and `labels` must hold `len` values.
 */
enum RelsimStatus relsim_cluster_spectral(const struct RelsimMatrix *m,
                                          size_t k,
                                          enum RelsimAffinity affinity,
                                          double sigma,
                                          size_t restarts,
                                          uint64_t seed,
                                          size_t *labels,
                                          size_t len);

/**
 * Adjusted Rand index of two labelings of `n` items. NaN on null input.
 *
 * # Safety
 * `a` and `b` must each point to `n` values.
 */
double relsim_ari(const size_t *a, const size_t *b, size_t n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELSIM_H */
