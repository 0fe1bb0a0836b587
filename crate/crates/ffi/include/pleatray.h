#ifndef PLEATRAY_H
#define PLEATRAY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PleatrayStatus {
  PLEATRAY_STATUS_OK = 0,
  PLEATRAY_STATUS_NULL_POINTER = 1,
  PLEATRAY_STATUS_INVALID_UTF8 = 2,
  PLEATRAY_STATUS_PARSE = 3,
  PLEATRAY_STATUS_SEMANTIC = 4,
  PLEATRAY_STATUS_NUMERICAL = 5,
  PLEATRAY_STATUS_OUT_OF_RANGE = 6,
  PLEATRAY_STATUS_PANIC = 7,
} PleatrayStatus;

/**
 * An exact trace polynomial.
 */
typedef struct PleatrayPolynomial PleatrayPolynomial;

/**
 * A traced pleating ray.
 */
typedef struct PleatrayRay PleatrayRay;

/**
 * A pants decomposition.
 */
typedef struct PleatraySurface PleatraySurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next call.
 */
const char *pleatray_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void pleatray_string_free(char *s);

/**
 * Built-in decomposition by name: `s11`, `s04` or `s12`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum PleatrayStatus pleatray_surface_builtin(const char *name, struct PleatraySurface **out);

/**
 * Decomposition from its JSON description.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum PleatrayStatus pleatray_surface_from_json(const char *json, struct PleatraySurface **out);

/**
 * Number of pants curves, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live surface handle.
 */
size_t pleatray_surface_xi(const struct PleatraySurface *s);

/**
 * # Safety
 * `s` must be null or a surface handle not yet freed.
 */
void pleatray_surface_free(struct PleatraySurface *s);

/**
 * Checks interleaved `q1,p1,...` (length `2 * len_pairs`) against the Dehn conditions.
 *
 * # Safety
 * `coords_ptr` must point to `2 * len_pairs` values; `valid` must be a valid pointer.
 */
enum PleatrayStatus pleatray_validate_dt(const struct PleatraySurface *s,
                                         const int64_t *coords_ptr,
                                         size_t len_pairs,
                                         bool *valid);

/**
 * Thurston pairing of two interleaved coordinate vectors of `len_pairs` pairs each.
 *
 * # Safety
 * `a` and `b` must each point to `2 * len_pairs` values; `out` must be valid.
 */
enum PleatrayStatus pleatray_pairing(const int64_t *a,
                                     const int64_t *b,
                                     size_t len_pairs,
                                     int64_t *out);

/**
 * Trace polynomial of a catalog word name or a PathWord JSON object.
 *
 * # Safety
 * `s` must be a live surface handle, `word` a nul-terminated string, `out` valid.
 */
enum PleatrayStatus pleatray_trace_poly(const struct PleatraySurface *s,
                                        const char *word,
                                        struct PleatrayPolynomial **out);

/**
 * JSON term list of the polynomial, or null for a null handle.
 *
 * # Safety
 * `p` must be null or a live polynomial handle.
 */
char *pleatray_polynomial_to_json(const struct PleatrayPolynomial *p);

/**
 * Evaluates at `n` complex points given as separate real and imaginary arrays.
 *
 * # Safety
 * `re` and `im` must point to `n` values; `out_re` and `out_im` must be valid.
 */
enum PleatrayStatus pleatray_polynomial_eval(const struct PleatrayPolynomial *p,
                                             const double *re,
                                             const double *im,
                                             size_t n,
                                             double *out_re,
                                             double *out_im);

/**
 * # Safety
 * `p` must be null or a polynomial handle not yet freed.
 */
void pleatray_polynomial_free(struct PleatrayPolynomial *p);

/**
 * Runs the top-terms verifier; `pass` receives the overall verdict.
 *
 * # Safety
 * `s` must be a live surface handle, `word` a nul-terminated string, `pass` valid.
 */
enum PleatrayStatus pleatray_verify_top(const struct PleatraySurface *s,
                                        const char *word,
                                        bool *pass);

/**
 * Traces the ray of the lamination with interleaved coordinates `lam` over a
 * strictly decreasing schedule, with the default solver options.
 *
 * # Safety
 * `s` must be a live built-in surface handle, `lam` must point to
 * `2 * len_pairs` values, `schedule` to `n` values, and `out` must be valid.
 */
enum PleatrayStatus pleatray_ray_trace(const struct PleatraySurface *s,
                                       const int64_t *lam,
                                       size_t len_pairs,
                                       const double *schedule,
                                       size_t n,
                                       struct PleatrayRay **out);

/**
 * Number of converged samples, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live ray handle.
 */
size_t pleatray_ray_sample_count(const struct PleatrayRay *r);

/**
 * Copies sample `k`: its height, `xi` parameters and residual.
 *
 * # Safety
 * `r` must be a live ray handle; `tau_re` and `tau_im` must have room for
 * `xi` values; `t` and `residual` must be valid.
 */
enum PleatrayStatus pleatray_ray_sample(const struct PleatrayRay *r,
                                        size_t k,
                                        size_t xi,
                                        double *t,
                                        double *tau_re,
                                        double *tau_im,
                                        double *residual);

/**
 * CSV rendering of the ray, or null for a null handle.
 *
 * # Safety
 * `r` must be null or a live ray handle.
 */
char *pleatray_ray_to_csv(const struct PleatrayRay *r);

/**
 * # Safety
 * `r` must be null or a ray handle not yet freed.
 */
void pleatray_ray_free(struct PleatrayRay *r);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PLEATRAY_H */
