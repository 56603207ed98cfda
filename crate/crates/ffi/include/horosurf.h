#ifndef HOROSURF_H
#define HOROSURF_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_NULL_POINTER = 1,
  HS_STATUS_INVALID_INPUT = 2,
  HS_STATUS_OUTSIDE_DOMAIN = 3,
  HS_STATUS_FOCAL = 4,
  HS_STATUS_SINGULAR = 5,
  HS_STATUS_NO_SOLUTION = 6,
  HS_STATUS_HYPOTHESIS_VIOLATED = 7,
  HS_STATUS_PANIC = 8,
} HsStatus;

// Opaque `rho` field on the sphere at infinity.
typedef struct HsField HsField;

// Opaque conformal map onto (or into) the unit disk.
typedef struct HsMap HsMap;

// Envelope data at one sphere point.
typedef struct HsSurfacePoint {
  // Ball coordinates of the envelope point.
  double position[3];
  // Principal curvatures, `k1 <= k2`.
  double k1;
  double k2;
  // `k1 k2 - 1`.
  double gauss;
  // `k1 + k2`.
  double mean;
  bool umbilic;
} HsSurfacePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *hs_last_error_message(void);

// Static, NUL-terminated version string.
const char *hs_version(void);

// # Safety
// `out` must be valid for a pointer write.
enum HsStatus hs_field_constant(double c, struct HsField **out);

// Field of the geodesic plane with unit normal `normal` at its center.
//
// # Safety
// `normal` must point to 3 doubles; `out` must be valid for a pointer write.
enum HsStatus hs_field_geodesic_plane(const double *normal, struct HsField **out);

// Field of a horosphere tangent at `tangency`, pushed out by `t`.
//
// # Safety
// `tangency` must point to 3 doubles; `out` must be valid for a pointer write.
enum HsStatus hs_field_horosphere(const double *tangency, double t, struct HsField **out);

// Field whose envelope is the geodesic with endpoints `axis` and `-axis`.
//
// # Safety
// `axis` must point to 3 doubles; `out` must be valid for a pointer write.
enum HsStatus hs_field_geodesic(const double *axis, struct HsField **out);

// Field of the hyperbolic metric pulled back by `map`, in the chart at the
// south pole.
//
// # Safety
// `map` must be a live handle; `out` must be valid for a pointer write.
enum HsStatus hs_field_from_map(const struct HsMap *map, struct HsField **out);

// New handle for `field + t`; the original stays valid.
//
// # Safety
// `field` must be a live handle; `out` must be valid for a pointer write.
enum HsStatus hs_field_with_offset(const struct HsField *field, double t, struct HsField **out);

// Value of the field at a sphere point.
//
// # Safety
// `field` must be a live handle, `theta` must point to 3 doubles and `out`
// must be valid for a write.
enum HsStatus hs_field_value(const struct HsField *field, const double *theta, double *out);

// # Safety
// `field` must be null or a handle not yet freed.
void hs_field_free(struct HsField *field);

// Envelope point and curvatures of `field` at the sphere point `theta`.
//
// # Safety
// `field` must be a live handle, `theta` must point to 3 doubles and `out`
// must be valid for a write.
enum HsStatus hs_surface_point(const struct HsField *field,
                               const double *theta,
                               struct HsSurfacePoint *out);

// # Safety
// `out` must be valid for a pointer write.
enum HsStatus hs_map_identity(struct HsMap **out);

// Inverse Koebe map from the plane slit along `(-inf, -1/4]`.
//
// # Safety
// `out` must be valid for a pointer write.
enum HsStatus hs_map_koebe(struct HsMap **out);

// Map from the sector `0 < arg w < pi/p` onto the disk.
//
// # Safety
// `out` must be valid for a pointer write.
enum HsStatus hs_map_power(double p, struct HsMap **out);

// Map from the strip `0 < Im w < width` onto the disk.
//
// # Safety
// `out` must be valid for a pointer write.
enum HsStatus hs_map_strip(double width, struct HsMap **out);

// Möbius map `(a w + b)/(c w + d)` restricted to the preimage of the disk.
// `coeffs` holds `a, b, c, d` as interleaved real and imaginary parts.
//
// # Safety
// `coeffs` must point to 8 doubles; `out` must be valid for a pointer write.
enum HsStatus hs_map_mobius(const double *coeffs, struct HsMap **out);

// # Safety
// `map` must be null or a handle not yet freed.
void hs_map_free(struct HsMap *map);

// Ratio `s = |S f| / mu` of the Schwarzian to the pulled-back density at `w`.
//
// # Safety
// `map` must be a live handle; `out` must be valid for a write.
enum HsStatus hs_map_ratio(const struct HsMap *map, double re, double im, double *out);

// Principal curvatures `k+` and `k-` at ratio `s` after flowing by `t`.
//
// # Safety
// `k_plus` and `k_minus` must be valid for writes.
enum HsStatus hs_weingarten_curvatures(double s, double t, double *k_plus, double *k_minus);

// Principal curvature `k0` flowed by `t`; `Focal` at the blowup time.
//
// # Safety
// `out` must be valid for a write.
enum HsStatus hs_flow_k(double k0, double t, double *out);

// Focal times of the curvature pair, ascending, merged when equal.
// Writes up to 2 times to `times` and their count to `count`.
//
// # Safety
// `times` must be valid for 2 writes and `count` for one.
enum HsStatus hs_focal_times(double k1, double k2, double *times, size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOROSURF_H */
