#ifndef HPM_H
#define HPM_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum HpmBackend {
  HPM_BACKEND_EXACT = 0,
  HPM_BACKEND_NUMERIC = 1,
} HpmBackend;

/**
 * Status codes; the nonzero values match the `hpm` exit codes where they
 * overlap.
 */
typedef enum HpmStatus {
  HPM_STATUS_OK = 0,
  HPM_STATUS_NULL_POINTER = 1,
  HPM_STATUS_INVALID_INPUT = 2,
  HPM_STATUS_NUMERIC = 3,
  HPM_STATUS_REFUSED = 4,
  HPM_STATUS_BUFFER_TOO_SMALL = 5,
  HPM_STATUS_PANIC = 6,
} HpmStatus;

/**
 * A plane curve with its optional anchored branch at infinity.
 */
typedef struct HpmCurve HpmCurve;

/**
 * One solved Hermite-Pade system.
 */
typedef struct HpmSolution HpmSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * owned by the library and valid until the next call on this thread.
 */
const char *hpm_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hpm_string_free(char *s);

/**
 * Reads a curve from the JSON file format used by the `hpm` tool.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HpmStatus hpm_curve_from_json(const char *json, struct HpmCurve **out);

/**
 * Parses `P(z, w) = 0` from an expression such as `w^2 - (z^2 - 1)`. The
 * curve has no anchored branch; set one with [`hpm_curve_set_pole_branch`].
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum HpmStatus hpm_curve_parse(const char *src, struct HpmCurve **out);

/**
 * Anchors the branch `w ~ leading z^order` at infinity. `leading` is a
 * Gaussian rational such as `1` or `3/2-i`.
 *
 * # Safety
 * `curve` must be a live handle; `leading` a NUL-terminated string.
 */
enum HpmStatus hpm_curve_set_pole_branch(struct HpmCurve *curve,
                                         uint32_t order,
                                         const char *leading);

/**
 * # Safety
 * `curve` must be null or a handle from this library, freed at most once.
 */
void hpm_curve_free(struct HpmCurve *curve);

/**
 * `m`, one less than the degree of the curve in `w`.
 *
 * # Safety
 * `curve` must be a live handle; `m` writable.
 */
enum HpmStatus hpm_curve_m(const struct HpmCurve *curve, size_t *m);

/**
 * Finite critical values as interleaved `(re, im)` doubles. On entry
 * `*count` is the capacity of `out` in values; on return it holds the
 * number of critical values. `BufferTooSmall` leaves `out` untouched.
 * `infinity` (may be null) receives whether infinity is critical.
 *
 * # Safety
 * `out` must hold `2 * *count` doubles.
 */
enum HpmStatus hpm_critical_values(const struct HpmCurve *curve,
                                   size_t prec_bits,
                                   double *out,
                                   size_t *count,
                                   bool *infinity);

/**
 * Monodromy generators and the orbits on `k`-subsets, as the JSON report
 * written by `hpm monodromy`.
 *
 * # Safety
 * `curve` must be a live handle; `out` writable.
 */
enum HpmStatus hpm_monodromy(const struct HpmCurve *curve, size_t k, size_t prec_bits, char **out);

/**
 * Germs of `f_1..f_m` at infinity to `t^order` as JSON. With `power_tuple`
 * only `fs[0]` is read and `f_j = f^j`.
 *
 * # Safety
 * `fs` must hold `nf` NUL-terminated strings; `out` writable.
 */
enum HpmStatus hpm_expand(const struct HpmCurve *curve,
                          const char *const *fs,
                          size_t nf,
                          bool power_tuple,
                          int64_t order,
                          enum HpmBackend backend,
                          size_t prec_bits,
                          char **out);

/**
 * Solves the system for degree parameter `n` and index `k`.
 *
 * # Safety
 * `fs` must hold `nf` NUL-terminated strings; `out` writable.
 */
enum HpmStatus hpm_solve(const struct HpmCurve *curve,
                         const char *const *fs,
                         size_t nf,
                         bool power_tuple,
                         size_t k,
                         size_t n,
                         enum HpmBackend backend,
                         size_t prec_bits,
                         struct HpmSolution **out);

/**
 * # Safety
 * `sol` must be null or a handle from this library, freed at most once.
 */
void hpm_solution_free(struct HpmSolution *sol);

/**
 * Dimension of the nullspace the solution was drawn from.
 *
 * # Safety
 * `sol` must be a live handle; `dim` writable.
 */
enum HpmStatus hpm_solution_nullspace_dim(const struct HpmSolution *sol, size_t *dim);

/**
 * The solution in the `solution` layout of `hpm solve`.
 *
 * # Safety
 * `sol` must be a live handle; `out` writable.
 */
enum HpmStatus hpm_solution_to_json(const struct HpmSolution *sol, char **out);

/**
 * `P_J(z) / P_I(z)` for `k`-subsets `J` and `I` of `{0..m}`, evaluated at
 * `re + i im` with `prec_bits` of working precision.
 *
 * # Safety
 * `j` and `i` must hold `k` entries; the outputs must be writable.
 */
enum HpmStatus hpm_ratio_eval(const struct HpmSolution *sol,
                              const size_t *j,
                              const size_t *i,
                              size_t k,
                              double re,
                              double im,
                              size_t prec_bits,
                              double *out_re,
                              double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HPM_H */
