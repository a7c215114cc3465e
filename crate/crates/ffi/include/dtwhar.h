#ifndef DTWHAR_H
#define DTWHAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum DtwharStatus {
  DTWHAR_STATUS_OK = 0,
  DTWHAR_STATUS_NULL_POINTER = 1,
  DTWHAR_STATUS_INVALID_ARGUMENT = 2,
  DTWHAR_STATUS_DOMAIN = 3,
  DTWHAR_STATUS_FORMAT = 4,
  DTWHAR_STATUS_PARSE = 5,
  DTWHAR_STATUS_CONSISTENCY = 6,
  DTWHAR_STATUS_IO = 7,
  DTWHAR_STATUS_PANIC = 8,
} DtwharStatus;

/**
 * A trained classification model.
 */
typedef struct DtwharModel DtwharModel;

/**
 * A time series of `len` observations with `dim` channels each.
 */
typedef struct DtwharSeries DtwharSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *dtwhar_last_error_message(void);

/**
 * Creates a series from `len * dim` row-major values.
 *
 * # Safety
 * `values` must point to `len * dim` readable doubles and `out` to a
 * writable handle slot.
 */
enum DtwharStatus dtwhar_series_new(const double *values,
                                    size_t len,
                                    size_t dim,
                                    struct DtwharSeries **out);

/**
 * Releases a series; null is ignored.
 *
 * # Safety
 * `series` must be null or a handle from [`dtwhar_series_new`] not yet freed.
 */
void dtwhar_series_free(struct DtwharSeries *series);

/**
 * Number of observations, or 0 for a null handle.
 *
 * # Safety
 * `series` must be null or a live handle.
 */
size_t dtwhar_series_len(const struct DtwharSeries *series);

/**
 * Number of channels, or 0 for a null handle.
 *
 * # Safety
 * `series` must be null or a live handle.
 */
size_t dtwhar_series_dim(const struct DtwharSeries *series);

/**
 * Banded DTW distance between two equally shaped series.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` writable.
 */
enum DtwharStatus dtwhar_dtw_distance(const struct DtwharSeries *a,
                                      const struct DtwharSeries *b,
                                      size_t bw,
                                      double *out);

/**
 * Subsequence DTW distance with displacement window `dw`.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` writable.
 */
enum DtwharStatus dtwhar_dtwsubseq_distance(const struct DtwharSeries *a,
                                            const struct DtwharSeries *b,
                                            size_t dw,
                                            size_t bw,
                                            double *out);

/**
 * Loads a model bundle directory written by `dtwhar train`.
 *
 * # Safety
 * `dir` must be a NUL-terminated UTF-8 path and `out` writable.
 */
enum DtwharStatus dtwhar_model_load(const char *dir, struct DtwharModel **out);

/**
 * Releases a model; null is ignored.
 *
 * # Safety
 * `model` must be null or a handle from [`dtwhar_model_load`] not yet freed.
 */
void dtwhar_model_free(struct DtwharModel *model);

/**
 * Number of templates in the model, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t dtwhar_model_num_templates(const struct DtwharModel *model);

/**
 * Predicted activity label of one series.
 *
 * # Safety
 * `model` and `series` must be live handles and `label` writable.
 */
enum DtwharStatus dtwhar_model_predict(const struct DtwharModel *model,
                                       const struct DtwharSeries *series,
                                       uint32_t *label);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DTWHAR_H */
