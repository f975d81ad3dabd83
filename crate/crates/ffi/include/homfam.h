#ifndef HOMFAM_H
#define HOMFAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. The numeric values match the command-line exit codes.
typedef enum {
  HOMFAM_STATUS_OK = 0,
  // Unknown family, unsupported variant or malformed document.
  HOMFAM_STATUS_USAGE = 2,
  // Parameter outside the natural domain, invalid point or degenerate data.
  HOMFAM_STATUS_DOMAIN = 3,
  // Integration or convergence failure.
  HOMFAM_STATUS_NUMERIC = 4,
  // A required pointer argument was null or a buffer length was wrong.
  HOMFAM_STATUS_INVALID_ARGUMENT = 5,
  // Internal panic; the handle should not be reused.
  HOMFAM_STATUS_PANIC = 6,
} HomfamStatus;

// Opaque family handle.
typedef struct HomfamFamily HomfamFamily;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *homfam_last_error(void);

// Create a family handle. `n < 0` and `lambda = NaN` select the default variant.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
HomfamStatus homfam_family_new(const char *name, int64_t n, double lambda, HomfamFamily **out);

// Release a handle created by `homfam_family_new`. Null is ignored.
//
// # Safety
// `family` must come from `homfam_family_new` and not be used afterwards.
void homfam_family_free(HomfamFamily *family);

// Length of the flat natural parameter, or 0 for a null handle.
//
// # Safety
// `family` must be null or a live handle.
size_t homfam_family_natural_len(const HomfamFamily *family);

// Number of chart coordinates per point, or 0 for a null handle.
//
// # Safety
// `family` must be null or a live handle.
size_t homfam_family_chart_len(const HomfamFamily *family);

// `A(θ)`, the log of the normalizing integral.
//
// # Safety
// `theta` must point to `theta_len` doubles and `out` to one double.
HomfamStatus homfam_log_partition(const HomfamFamily *family,
                                  const double *theta,
                                  size_t theta_len,
                                  double *out);

// Log-densities of `n_points` points with respect to the family's base measure.
//
// # Safety
// `points` must hold `n_points * chart_len` doubles and `out` `n_points`.
HomfamStatus homfam_log_density(const HomfamFamily *family,
                                const double *theta,
                                size_t theta_len,
                                const double *points,
                                size_t n_points,
                                double *out);

// Draw `count` points; coordinates are written row by row into `out`.
//
// # Safety
// `out` must have room for `count * chart_len` doubles.
HomfamStatus homfam_sample(const HomfamFamily *family,
                           const double *theta,
                           size_t theta_len,
                           size_t count,
                           uint64_t seed,
                           double *out);

// Maximum likelihood estimate from `n_points` observations.
//
// # Safety
// `points` must hold `n_points * chart_len` doubles and `out_theta` `natural_len`.
HomfamStatus homfam_fit(const HomfamFamily *family,
                        const double *points,
                        size_t n_points,
                        double *out_theta,
                        size_t out_len);

// Natural parameter from a JSON parameter document (either parameterization).
// The document's family must match the handle.
//
// # Safety
// `json` must be a NUL-terminated string and `out_theta` hold `out_len` doubles.
HomfamStatus homfam_natural_from_document(const HomfamFamily *family,
                                          const char *json,
                                          double *out_theta,
                                          size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOMFAM_H */
