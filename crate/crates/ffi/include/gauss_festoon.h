#ifndef GAUSS_FESTOON_H
#define GAUSS_FESTOON_H

/* Generated by cbindgen from the gauss-festoon-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes returned by every fallible function.
 */
typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_NULL_POINTER = 1,
  GF_STATUS_INVALID_ARGUMENT = 2,
  GF_STATUS_DEGENERATE_INPUT = 3,
  GF_STATUS_ORIGIN_NOT_INTERIOR = 4,
  GF_STATUS_LAMBDA_TOO_SMALL = 5,
  GF_STATUS_MISSING_BETA = 6,
  GF_STATUS_TRUNCATION_DOMINATES = 7,
  GF_STATUS_BUFFER_TOO_SMALL = 8,
  GF_STATUS_INTERNAL = 99,
} GfStatus;

/**
 * Opaque convex hull together with the cloud it was built from.
 */
typedef struct GfHull GfHull;

/**
 * Opaque sample of the limiting Poisson process on a window.
 */
typedef struct GfLimitSample GfLimitSample;

/**
 * Opaque point cloud in R^d.
 */
typedef struct GfPointCloud GfPointCloud;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or NULL if the
 * last call succeeded. The pointer stays valid until the next library call
 * on the same thread.
 */
const char *gf_last_error_message(void);

/**
 * Version string of the library, statically allocated.
 */
const char *gf_version(void);

/**
 * Copies `n * dim` row-major coordinates into a new point cloud.
 *
 * # Safety
 * `coords` must point to `n * dim` readable doubles; `out` must be writable.
 */
enum GfStatus gf_cloud_new(uintptr_t dim,
                           const double *coords,
                           uintptr_t n,
                           struct GfPointCloud **out);

/**
 * Samples `n` i.i.d. standard Gaussian points in R^d from `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GfStatus gf_cloud_sample_gaussian(uintptr_t n,
                                       uintptr_t dim,
                                       uint64_t seed,
                                       struct GfPointCloud **out);

/**
 * Number of points in the cloud.
 *
 * # Safety
 * `cloud` must be a live handle; `out` must be writable.
 */
enum GfStatus gf_cloud_len(const struct GfPointCloud *cloud, uintptr_t *out);

/**
 * Releases a point cloud. Passing NULL is a no-op.
 *
 * # Safety
 * `cloud` must be NULL or a handle not yet freed.
 */
void gf_cloud_free(struct GfPointCloud *cloud);

/**
 * Builds the convex hull of a cloud. The cloud handle remains owned by the
 * caller.
 *
 * # Safety
 * `cloud` must be a live handle; `out` must be writable.
 */
enum GfStatus gf_hull_new(const struct GfPointCloud *cloud, struct GfHull **out);

/**
 * Dimension of the hull's ambient space.
 *
 * # Safety
 * `hull` must be a live handle; `out` must be writable.
 */
enum GfStatus gf_hull_dim(const struct GfHull *hull, uintptr_t *out);

/**
 * Writes the f-vector `(f_0, ..., f_{d-1})` into `buf`. `written` always
 * receives the required length; if `capacity` is smaller the call returns
 * [`GfStatus::BufferTooSmall`] and writes nothing to `buf`.
 *
 * # Safety
 * `hull` must be a live handle; `buf` must hold `capacity` writable
 * elements (may be NULL when `capacity` is 0); `written` must be writable.
 */
enum GfStatus gf_hull_f_vector(const struct GfHull *hull,
                               uintptr_t *buf,
                               uintptr_t capacity,
                               uintptr_t *written);

/**
 * d-dimensional volume of the hull.
 *
 * # Safety
 * `hull` must be a live handle; `out` must be writable.
 */
enum GfStatus gf_hull_volume(const struct GfHull *hull, double *out);

/**
 * Releases a hull. Passing NULL is a no-op.
 *
 * # Safety
 * `hull` must be NULL or a handle not yet freed.
 */
void gf_hull_free(struct GfHull *hull);

/**
 * Critical radius `R(lambda)` of the Gaussian sample in dimension `dim`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GfStatus gf_critical_radius(double lambda, uintptr_t dim, double *out);

/**
 * Internal angle `beta_{k,n}` of the regular simplex with `n + 1` vertices
 * at a k-face. `std_error` receives 0 for closed forms and the Monte Carlo
 * standard error otherwise; it may be NULL.
 *
 * # Safety
 * `value` must be writable; `std_error` must be NULL or writable.
 */
enum GfStatus gf_internal_angle(uintptr_t k, uintptr_t n, double *value, double *std_error);

/**
 * Samples the limiting process on `[-half_width, half_width]^{dim_minus_1}`
 * times `(-inf, h_max]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GfStatus gf_limit_sample(uintptr_t dim_minus_1,
                              double half_width,
                              double h_max,
                              uint64_t seed,
                              struct GfLimitSample **out);

/**
 * Number of sampled points.
 *
 * # Safety
 * `sample` must be a live handle; `out` must be writable.
 */
enum GfStatus gf_limit_point_count(const struct GfLimitSample *sample, uintptr_t *out);

/**
 * Number of extreme points of the sample (points on the down-paraboloid
 * hull).
 *
 * # Safety
 * `sample` must be a live handle; `out` must be writable.
 */
enum GfStatus gf_limit_extreme_count(const struct GfLimitSample *sample, uintptr_t *out);

/**
 * Releases a limit sample. Passing NULL is a no-op.
 *
 * # Safety
 * `sample` must be NULL or a handle not yet freed.
 */
void gf_limit_sample_free(struct GfLimitSample *sample);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAUSS_FESTOON_H */
