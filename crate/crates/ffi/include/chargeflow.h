#ifndef CHARGEFLOW_H
#define CHARGEFLOW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Nonzero values match the CLI exit codes where both exist.
 */
typedef enum {
  CF_STATUS_OK = 0,
  CF_STATUS_IO = 1,
  CF_STATUS_COLLISION = 2,
  CF_STATUS_INVALID_INPUT = 3,
  CF_STATUS_NON_CONVERGENCE = 4,
  CF_STATUS_CERTIFICATION_FAILED = 5,
  CF_STATUS_NULL_POINTER = 6,
  CF_STATUS_BUFFER_TOO_SMALL = 7,
  CF_STATUS_OUT_OF_RANGE = 8,
  CF_STATUS_PANIC = 9,
} CfStatus;

/**
 * Opaque certified equilibrium pair.
 */
typedef struct CfCertificate CfCertificate;

/**
 * Opaque sampled trajectory.
 */
typedef struct CfTrajectory CfTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cf_version(void);

/**
 * Copy the calling thread's last error message into `buf`.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null; `needed` must be valid or null.
 */
CfStatus cf_last_error(char *buf, size_t len, size_t *needed);

/**
 * Hermite Wronskian pair for strictly increasing `indices` and b = b_num / b_den.
 *
 * # Safety
 * `indices` must point to `count` values; `out` must be a valid pointer.
 */
CfStatus cf_certificate_hermite(const size_t *indices,
                                size_t count,
                                int64_t b_num,
                                int64_t b_den,
                                CfCertificate **out);

/**
 * Build and certify the pair described by a recipe JSON object, e.g.
 * `{"kind":"adler_moser","k":2,"ts":["0","1/2","0"]}`.
 *
 * # Safety
 * `recipe_json` must be a NUL-terminated string; `out` must be valid.
 */
CfStatus cf_certificate_from_recipe(const char *recipe_json, CfCertificate **out);

/**
 * Load a certificate document and re-certify it.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid.
 */
CfStatus cf_certificate_from_json(const char *json, CfCertificate **out);

/**
 * Serialize to JSON. Call with a null buffer to learn the size.
 *
 * # Safety
 * `cert` must come from this library; `buf` valid for `len` bytes or null.
 */
CfStatus cf_certificate_to_json(const CfCertificate *cert, char *buf, size_t len, size_t *needed);

/**
 * Degrees of (p, q).
 *
 * # Safety
 * All pointers must be valid.
 */
CfStatus cf_certificate_degrees(const CfCertificate *cert, size_t *p, size_t *q);

/**
 * 1 if the residual vanished identically in exact arithmetic, else 0.
 *
 * # Safety
 * `cert` must come from this library or be null.
 */
int32_t cf_certificate_is_exact(const CfCertificate *cert);

/**
 * Number of distinct charge sites.
 *
 * # Safety
 * `cert` must come from this library or be null.
 */
size_t cf_certificate_site_count(const CfCertificate *cert);

/**
 * Position and integer charge of site `index`.
 *
 * # Safety
 * All pointers must be valid.
 */
CfStatus cf_certificate_site(const CfCertificate *cert,
                             size_t index,
                             double *re,
                             double *im,
                             int64_t *charge);

/**
 * # Safety
 * `cert` must come from this library (or be null) and not be used afterwards.
 */
void cf_certificate_free(CfCertificate *cert);

/**
 * Integrate the rational-ω flow of `n` charges +1 and `m` charges −Λ from
 * the given positions (x's first) up to `t_end`, sampled at `samples + 1`
 * uniform times.
 *
 * # Safety
 * `re` and `im` must each point to `n + m` values; `out` must be valid.
 */
CfStatus cf_simulate_rational_omega(double omega,
                                    double capital_lambda,
                                    size_t n,
                                    size_t m,
                                    const double *re,
                                    const double *im,
                                    double t_end,
                                    double rtol,
                                    double atol,
                                    size_t samples,
                                    CfTrajectory **out);

/**
 * Number of stored samples.
 *
 * # Safety
 * `traj` must come from this library or be null.
 */
size_t cf_trajectory_len(const CfTrajectory *traj);

/**
 * Number of particles per sample.
 *
 * # Safety
 * `traj` must come from this library or be null.
 */
size_t cf_trajectory_particles(const CfTrajectory *traj);

/**
 * Time and position of one particle at one sample.
 *
 * # Safety
 * All pointers must be valid.
 */
CfStatus cf_trajectory_sample(const CfTrajectory *traj,
                              size_t sample,
                              size_t particle,
                              double *t,
                              double *re,
                              double *im);

/**
 * # Safety
 * `traj` must come from this library (or be null) and not be used afterwards.
 */
void cf_trajectory_free(CfTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHARGEFLOW_H */
