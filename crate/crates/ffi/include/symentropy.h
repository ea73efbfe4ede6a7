#ifndef SYMENTROPY_H
#define SYMENTROPY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum SeStatus {
  SE_STATUS_OK = 0,
  SE_STATUS_NULL_POINTER = 1,
  SE_STATUS_DOMAIN = 2,
  SE_STATUS_QUADRATURE = 3,
  SE_STATUS_CONVERGENCE = 4,
  SE_STATUS_CONTOUR = 5,
  // The quantity is infinite; the out value holds a signed infinity.
  SE_STATUS_DIVERGENT = 6,
  SE_STATUS_NOT_COMPARABLE = 7,
  SE_STATUS_PANIC = 8,
} SeStatus;

// Quadrature settings.
typedef struct SeConfig SeConfig;

// A point `(e_1, ..., e_d)` with non-negative coordinates.
typedef struct SePoint SePoint;

typedef struct SeUpperBounds {
  double a;
  double b;
  double h_bound;
  double q_bound;
  double hu_bound;
} SeUpperBounds;

typedef struct SeHaarEstimate {
  double mean_hm;
  double std_error;
  double implied_q;
  double reference_q;
  double z_score;
} SeHaarEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *se_version(void);

// Copies the calling thread's last error message into `buf` (truncated,
// always NUL-terminated when `len > 0`). Returns the full message length
// excluding the terminator, or 0 if there is none.
//
// # Safety
// `buf` must be valid for `len` bytes or null.
size_t se_last_error_message(char *buf, size_t len);

// Creates a quadrature configuration.
//
// # Safety
// `out` must be a valid pointer.
enum SeStatus se_config_new(double rel_tol,
                            double abs_tol,
                            size_t max_subdivisions,
                            struct SeConfig **out);

// # Safety
// `cfg` must come from [`se_config_new`] and not be freed twice.
void se_config_free(struct SeConfig *cfg);

// Creates a point from `d` coordinates `e_1..e_d`.
//
// # Safety
// `coeffs` must be valid for `d` reads and `out` must be valid.
enum SeStatus se_point_new(const double *coeffs, size_t d, struct SePoint **out);

// Creates the point of elementary symmetric polynomials of `x`.
//
// # Safety
// `x` must be valid for `d` reads and `out` must be valid.
enum SeStatus se_point_from_probabilities(const double *x, size_t d, struct SePoint **out);

// Dimension of the point, or 0 for null.
//
// # Safety
// `point` must be a live handle or null.
size_t se_point_dim(const struct SePoint *point);

// # Safety
// `point` must come from a `se_point_*` constructor and not be freed twice.
void se_point_free(struct SePoint *point);

// Entropy from the coordinates. A null `cfg` uses the default settings.
//
// # Safety
// `point` must be a live handle, `cfg` a live handle or null, `out` valid.
enum SeStatus se_entropy(const struct SePoint *point, const struct SeConfig *cfg, double *out);

// Subentropy from the coordinates. A null `cfg` uses the default settings.
//
// # Safety
// As for [`se_entropy`].
enum SeStatus se_subentropy(const struct SePoint *point, const struct SeConfig *cfg, double *out);

// Entropy and subentropy straight from `x`.
//
// # Safety
// `x` must be valid for `d` reads; `h` and `q` must be valid.
enum SeStatus se_entropy_direct(const double *x, size_t d, double *h, double *q);

// Mixed partial derivative of the entropy with respect to
// `e_{indices[0]}, ..., e_{indices[order-1]}` (1-based). Returns
// `Divergent` with a signed infinity in `out` when the integral diverges.
//
// # Safety
// `indices` must be valid for `order` reads; otherwise as for [`se_entropy`].
enum SeStatus se_dh(const struct SePoint *point,
                    const size_t *indices,
                    size_t order,
                    const struct SeConfig *cfg,
                    double *out);

// Subentropy analogue of [`se_dh`].
//
// # Safety
// As for [`se_dh`].
enum SeStatus se_dq(const struct SePoint *point,
                    const size_t *indices,
                    size_t order,
                    const struct SeConfig *cfg,
                    double *out);

// Upper bounds on entropy and subentropy given `e_1`, `e_2` and `d`.
//
// # Safety
// `out` must be valid.
enum SeStatus se_upper_bounds(double e1, double e2, size_t d, struct SeUpperBounds *out);

// Monte Carlo estimate of the subentropy of a diagonal state from
// Haar-random measurement bases.
//
// # Safety
// `eigenvalues` must be valid for `d` reads and `out` must be valid.
enum SeStatus se_haar_estimate(const double *eigenvalues,
                               size_t d,
                               size_t samples,
                               uint64_t seed,
                               struct SeHaarEstimate *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SYMENTROPY_H */
