#ifndef ZICOUNT_H
#define ZICOUNT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum ZcStatus {
  ZC_STATUS_OK = 0,
  ZC_STATUS_NULL_POINTER = 1,
  ZC_STATUS_DOMAIN = 2,
  ZC_STATUS_PARSE = 3,
  ZC_STATUS_USAGE = 4,
  ZC_STATUS_EMPTY_DATASET = 5,
  ZC_STATUS_IO = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  ZC_STATUS_INTERNAL = 7,
} ZcStatus;

typedef enum ZcFamily {
  /**
   * Discretised lognormal: `first` = mu, `second` = sigma.
   */
  ZC_FAMILY_DLN = 0,
  /**
   * Hooked power law: `first` = alpha, `second` = B (shifted convention).
   */
  ZC_FAMILY_HOOKED = 1,
} ZcFamily;

/**
 * Opaque dataset handle.
 */
typedef struct ZcDataset ZcDataset;

/**
 * Opaque fit handle.
 */
typedef struct ZcFit ZcFit;

/**
 * A model: a base family and the probability `p` of the extra point mass at 1.
 */
typedef struct ZcModel {
  enum ZcFamily family;
  double first;
  double second;
  double p;
} ZcModel;

/**
 * Summary of a fit. `params.p` is k / n_total for inflated fits and 0 otherwise.
 */
typedef struct ZcFitSummary {
  struct ZcModel params;
  bool zero_inflated;
  uint64_t k;
  uint64_t n_total;
  uint64_t r;
  double loglik;
  double aic;
  double ks;
  bool converged;
  uint64_t evaluations;
} ZcFitSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread; do not free it.
 */
const char *zc_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void zc_string_free(char *s);

/**
 * Builds a dataset from `len` raw counts (shifted by +1 internally).
 *
 * # Safety
 * `counts` must point to `len` readable values; `out` must be writable.
 */
enum ZcStatus zc_dataset_from_counts(const uint64_t *counts, size_t len, struct ZcDataset **out);

/**
 * Loads a dataset from a file: one raw count per line, or CSV when `csv` is true.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum ZcStatus zc_dataset_load(const char *path, bool csv, struct ZcDataset **out);

/**
 * Frees a dataset. Null is ignored.
 *
 * # Safety
 * `data` must come from this library and not have been freed.
 */
void zc_dataset_free(struct ZcDataset *data);

/**
 * Number of articles, and how many of them are uncited (shifted value 1).
 *
 * # Safety
 * `data` must be a live dataset; the out pointers may be null.
 */
enum ZcStatus zc_dataset_size(const struct ZcDataset *data, uint64_t *n_total, uint64_t *ones);

/**
 * Probability mass at shifted count `n` (n >= 1).
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum ZcStatus zc_pmf(const struct ZcModel *model, uint64_t n, double *out);

/**
 * Cumulative probability P(X <= n) at shifted count `n` (n >= 1).
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum ZcStatus zc_cdf(const struct ZcModel *model, uint64_t n, double *out);

/**
 * Draws `n` shifted counts from `model` with the given seed.
 *
 * # Safety
 * `model` must be valid; `out` must be writable.
 */
enum ZcStatus zc_sample(const struct ZcModel *model,
                        uint64_t n,
                        uint64_t seed,
                        struct ZcDataset **out);

/**
 * Fits one model. With `zero_inflated`, the k-scan visits every `stride`-th
 * k (1 for all of them), refined around the best when `refine` is set.
 *
 * # Safety
 * `data` must be a live dataset; `out` must be writable.
 */
enum ZcStatus zc_fit(const struct ZcDataset *data,
                     enum ZcFamily family,
                     bool zero_inflated,
                     uint64_t stride,
                     bool refine,
                     struct ZcFit **out);

/**
 * Frees a fit. Null is ignored.
 *
 * # Safety
 * `fit` must come from this library and not have been freed.
 */
void zc_fit_free(struct ZcFit *fit);

/**
 * Copies the fit's numbers into `out`.
 *
 * # Safety
 * `fit` must be a live fit; `out` must be writable.
 */
enum ZcStatus zc_fit_summary(const struct ZcFit *fit, struct ZcFitSummary *out);

/**
 * The fit as a JSON record, in the same schema the command-line tool writes.
 *
 * # Safety
 * `fit` must be a live fit; `out` must be writable. Free the string with
 * [`zc_string_free`].
 */
enum ZcStatus zc_fit_json(const struct ZcFit *fit, char **out);

/**
 * Fits all four models and writes the comparison as JSON.
 *
 * # Safety
 * `data` must be a live dataset; `out` must be writable. Free the string
 * with [`zc_string_free`].
 */
enum ZcStatus zc_compare_json(const struct ZcDataset *data,
                              uint64_t stride,
                              bool refine,
                              char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZICOUNT_H */
