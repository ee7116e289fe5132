#ifndef SURROGATE_MORPH_H
#define SURROGATE_MORPH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SmBitDepth {
  SM_BIT_DEPTH_PCM16 = 0,
  SM_BIT_DEPTH_PCM24 = 1,
  SM_BIT_DEPTH_FLOAT32 = 2,
} SmBitDepth;

typedef enum SmMode {
  SM_MODE_RMS_ONLY = 0,
  SM_MODE_SPECTRAL_ONLY = 1,
  SM_MODE_BOTH = 2,
  SM_MODE_NONE = 3,
} SmMode;

typedef enum SmStatus {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_POINTER = 1,
  SM_STATUS_INVALID_ARGUMENT = 2,
  SM_STATUS_IO = 3,
  SM_STATUS_AUDIO_FORMAT = 4,
  SM_STATUS_DSP = 5,
  SM_STATUS_METRIC = 6,
  SM_STATUS_PANIC = 7,
} SmStatus;

/**
 * Mean and covariance of a set of embeddings.
 */
typedef struct SmGaussianStats SmGaussianStats;

/**
 * Decoded audio.
 */
typedef struct SmWaveform SmWaveform;

/**
 * Augmentation tunables. Start from [`sm_augment_params_default`].
 */
typedef struct SmAugmentParams {
  size_t rms_frame_size;
  size_t rms_hop;
  size_t eq_smooth_window;
  double epsilon;
  float output_peak;
} SmAugmentParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL if the last
 * call succeeded. The pointer stays valid until the next call into this
 * library on the same thread.
 */
const char *sm_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void sm_string_free(char *s);

/**
 * Build a waveform from interleaved samples (`frames * channels` values).
 *
 * # Safety
 * `samples` must point to `frames * channels` readable floats.
 */
enum SmStatus sm_waveform_new(const float *samples,
                              size_t frames,
                              uint32_t channels,
                              uint32_t sample_rate,
                              struct SmWaveform **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum SmStatus sm_waveform_load(const char *path, struct SmWaveform **out);

/**
 * `depth` is an [`SmBitDepth`] value.
 *
 * # Safety
 * `w` must be a live handle and `path` a NUL-terminated string.
 */
enum SmStatus sm_waveform_save(const struct SmWaveform *w, const char *path, uint32_t depth);

/**
 * # Safety
 * `w` must be a live handle; each out-pointer may be NULL.
 */
enum SmStatus sm_waveform_info(const struct SmWaveform *w,
                               size_t *frames,
                               uint32_t *channels,
                               uint32_t *sample_rate);

/**
 * Copy interleaved samples into `dst`, which holds `capacity` floats and
 * must fit `frames * channels`.
 *
 * # Safety
 * `w` must be a live handle and `dst` writable for `capacity` floats.
 */
enum SmStatus sm_waveform_read(const struct SmWaveform *w, float *dst, size_t capacity);

/**
 * # Safety
 * `w` must be NULL or a handle from this library, not yet freed.
 */
void sm_waveform_free(struct SmWaveform *w);

struct SmAugmentParams sm_augment_params_default(void);

/**
 * Build one surrogate morph. `mode` is an [`SmMode`] value; `params` may be
 * NULL for the defaults.
 *
 * # Safety
 * `primary` and `secondary` must be live handles; `params` NULL or valid.
 */
enum SmStatus sm_augment_pair(const struct SmWaveform *primary,
                              const struct SmWaveform *secondary,
                              uint32_t mode,
                              const struct SmAugmentParams *params,
                              struct SmWaveform **out);

/**
 * Caption for an [`SmMode`] value; free the result with [`sm_string_free`].
 *
 * # Safety
 * `x` and `y` must be NUL-terminated UTF-8 strings.
 */
enum SmStatus sm_caption(uint32_t mode, const char *x, const char *y, char **out);

/**
 * # Safety
 * `a` and `b` must each point to `dim` readable doubles.
 */
enum SmStatus sm_cosine_similarity(const double *a, const double *b, size_t dim, double *out);

double sm_correspondence(double sim_x, double sim_y);

/**
 * # Safety
 * `out` must be writable.
 */
enum SmStatus sm_intermediateness(double sim_x, double sim_y, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SmStatus sm_directionality(double s_int, double s_rev, double temperature, double *out);

/**
 * LCS of a row-major `rows x cols` latent matrix.
 *
 * # Safety
 * `data` must point to `rows * cols` readable doubles.
 */
enum SmStatus sm_lcs(const double *data, size_t rows, size_t cols, double *out);

/**
 * Mean and covariance of `rows` row-major embeddings of width `cols`.
 *
 * # Safety
 * `data` must point to `rows * cols` readable doubles.
 */
enum SmStatus sm_gaussian_stats_from_rows(const double *data,
                                          size_t rows,
                                          size_t cols,
                                          struct SmGaussianStats **out);

/**
 * # Safety
 * `s` must be a live handle; `dim` writable.
 */
enum SmStatus sm_gaussian_stats_dim(const struct SmGaussianStats *s, size_t *dim);

/**
 * # Safety
 * `s` must be NULL or a handle from this library, not yet freed.
 */
void sm_gaussian_stats_free(struct SmGaussianStats *s);

/**
 * # Safety
 * `a` and `b` must be live handles.
 */
enum SmStatus sm_frechet_distance(const struct SmGaussianStats *a,
                                  const struct SmGaussianStats *b,
                                  double *out);

/**
 * # Safety
 * `x` and `y` must each point to `n` readable doubles.
 */
enum SmStatus sm_spearman(const double *x, const double *y, size_t n, double *out);

/**
 * ROC AUC; `labels` holds 0 for negatives and anything else for positives.
 *
 * # Safety
 * `scores` and `labels` must each point to `n` readable values.
 */
enum SmStatus sm_roc_auc(const double *scores, const uint8_t *labels, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURROGATE_MORPH_H */
