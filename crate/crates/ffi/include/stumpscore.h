#ifndef STUMPSCORE_H
#define STUMPSCORE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum SsObjective {
  /*
   Continuous outcome, squared error.
   */
  SS_OBJECTIVE_REGRESSION = 0,
  /*
   0/1 outcome, logistic loss.
   */
  SS_OBJECTIVE_BINARY = 1,
  /*
   Time-to-event outcome, pairwise ranking loss.
   */
  SS_OBJECTIVE_SURVIVAL = 2,
} SsObjective;

typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_ARGUMENT = 2,
  SS_STATUS_DATA_ERROR = 3,
  SS_STATUS_FIT_ERROR = 4,
  SS_STATUS_NOT_FITTED = 5,
  SS_STATUS_IO = 6,
  SS_STATUS_MODEL_ERROR = 7,
  SS_STATUS_INTERNAL = 8,
} SsStatus;

/*
 Opaque estimator handle.
 */
typedef struct SsEstimator SsEstimator;

/*
 Estimator constructor parameters.
 */
typedef struct SsParams {
  enum SsObjective objective;
  size_t n_iter;
  double learning_rate;
  size_t n_quantiles;
  double subsample;
  uint64_t seed;
} SsParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library defaults for `objective`.
 */
struct SsParams ss_params_default(enum SsObjective objective);

/*
 Message for the last failed call on this thread. Owned by the library and
 valid until the next failing call on the same thread.
 */
const char *ss_last_error(void);

/*
 Creates an unfitted estimator. `params` may be null for regression
 defaults.

 # Safety
 `params` must be null or point to a valid `SsParams`; `out` must be valid
 for writes.
 */
enum SsStatus ss_estimator_new(const struct SsParams *params, struct SsEstimator **out);

/*
 # Safety
 `h` must be null or a handle from this library not yet freed.
 */
void ss_estimator_free(struct SsEstimator *h);

/*
 Replaces quantile cutoffs with user cutoffs in thresholds-file syntax
 (`name: v1, v2` per line). Features not listed are excluded unless
 `merge_quantiles` is nonzero. A null `text` restores quantile cutoffs.

 # Safety
 `h` must be a live handle; `text` null or a NUL-terminated string.
 */
enum SsStatus ss_estimator_set_thresholds(struct SsEstimator *h,
                                          const char *text,
                                          int32_t merge_quantiles);

/*
 Fits on a row-major `n_rows` x `n_cols` table. `names` holds `n_cols`
 feature names or is null (names become `x0`, `x1`, ...). `y` holds the
 target, 0/1 labels, or survival times; `events` holds 0/1 event flags and
 is only read for the survival objective.

 # Safety
 Pointers must reference arrays of the stated lengths.
 */
enum SsStatus ss_estimator_fit(struct SsEstimator *h,
                               const double *x,
                               size_t n_rows,
                               size_t n_cols,
                               const char *const *names,
                               const double *y,
                               const uint8_t *events);

/*
 Raw scores for a row-major table with the training columns in training
 order. `out` must hold `n_rows` values.

 # Safety
 `x` must hold `n_rows * n_cols` values and `out` `n_rows`.
 */
enum SsStatus ss_estimator_predict(const struct SsEstimator *h,
                                   const double *x,
                                   size_t n_rows,
                                   size_t n_cols,
                                   double *out);

/*
 Renders the score card with `decimals` digits into a new string.

 # Safety
 `h` must be a live handle and `out` valid for writes.
 */
enum SsStatus ss_estimator_print(const struct SsEstimator *h, size_t decimals, char **out);

/*
 Model file contents as a new string.

 # Safety
 `h` must be a live handle and `out` valid for writes.
 */
enum SsStatus ss_estimator_to_json(const struct SsEstimator *h, char **out);

/*
 # Safety
 `h` must be a live handle and `path` a NUL-terminated string.
 */
enum SsStatus ss_estimator_save(const struct SsEstimator *h, const char *path);

/*
 Creates a fitted estimator from a model file.

 # Safety
 `path` must be a NUL-terminated string and `out` valid for writes.
 */
enum SsStatus ss_estimator_load(const char *path, struct SsEstimator **out);

/*
 # Safety
 `h` must be a live handle and `out` valid for writes.
 */
enum SsStatus ss_estimator_is_fitted(const struct SsEstimator *h, int32_t *out);

/*
 Number of retained cutoffs across all variables.

 # Safety
 `h` must be a live handle and `out` valid for writes.
 */
enum SsStatus ss_estimator_rule_count(const struct SsEstimator *h, size_t *out);

/*
 # Safety
 `h` must be a live handle and `out` valid for writes.
 */
enum SsStatus ss_estimator_objective(const struct SsEstimator *h, enum SsObjective *out);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void ss_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STUMPSCORE_H */
