#ifndef HOLDERLIE_H
#define HOLDERLIE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_ARGUMENT = 2,
  HL_STATUS_DIAMETER_EXCEEDED = 3,
  HL_STATUS_ORDER_EXCEEDED = 4,
  HL_STATUS_OUTSIDE_CONVERGENCE_DOMAIN = 5,
  HL_STATUS_LOG_DOMAIN = 6,
  HL_STATUS_NOT_CONVERGED = 7,
  HL_STATUS_CONFIG_INVALID = 8,
  HL_STATUS_IO = 9,
  HL_STATUS_PANIC = 10,
} HlStatus;

/**
 * Opaque convex domain.
 */
typedef struct HlDomain HlDomain;

/**
 * Opaque polynomial `ℝⁿ → ℝ^m`.
 */
typedef struct HlPolynomial HlPolynomial;

/**
 * Sampled Hölder norm `total = sup_part + seminorm_part` (`sup_part` alone for `(0, 0)`).
 */
typedef struct HlNormEstimate {
  double sup_part;
  double seminorm_part;
  double total;
} HlNormEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Free with [`hl_string_free`].
 */
char *hl_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hl_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *hl_version(void);

/**
 * Open ball; fails with `DiameterExceeded` when `2 radius > 1`.
 *
 * # Safety
 * `center` must point to `dim` doubles and `out` to writable storage.
 */
enum HlStatus hl_domain_ball(const double *center,
                             size_t dim,
                             double radius,
                             struct HlDomain **out);

/**
 * Open box `∏ (lower_i, upper_i)`.
 *
 * # Safety
 * `lower` and `upper` must point to `dim` doubles and `out` to writable storage.
 */
enum HlStatus hl_domain_box(const double *lower,
                            const double *upper,
                            size_t dim,
                            struct HlDomain **out);

/**
 * # Safety
 * `d` must be null or a live handle from this library.
 */
void hl_domain_free(struct HlDomain *d);

/**
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum HlStatus hl_domain_diameter(const struct HlDomain *d, double *out);

/**
 * `t ↦ Σ coeffs[j] t^j` on ℝ.
 *
 * # Safety
 * `coeffs` must point to `len >= 1` doubles and `out` to writable storage.
 */
enum HlStatus hl_polynomial_univariate(const double *coeffs, size_t len, struct HlPolynomial **out);

/**
 * Polynomial from a corpus function record
 * `{"id", "in_dim", "out_dim", "parts": [[…], …]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum HlStatus hl_polynomial_from_json(const char *json, struct HlPolynomial **out);

/**
 * # Safety
 * `p` must be null or a live handle from this library.
 */
void hl_polynomial_free(struct HlPolynomial *p);

/**
 * Writes `γ(x)` into `out[0 … out_len)`; `out_len` must equal the output dimension.
 *
 * # Safety
 * `x` must hold `x_len` doubles and `out` `out_len` writable doubles.
 */
enum HlStatus hl_polynomial_eval(const struct HlPolynomial *p,
                                 const double *x,
                                 size_t x_len,
                                 double *out,
                                 size_t out_len);

/**
 * Sampled `‖γ‖_{(k,s)}` on a sample plan given as JSON, or a default
 * quasirandom plan of 48 points when `plan_json` is null.
 *
 * # Safety
 * Handles must be live, `plan_json` null or NUL-terminated, `out` writable.
 */
enum HlStatus hl_holder_norm(const struct HlPolynomial *p,
                             const struct HlDomain *d,
                             size_t k,
                             double s,
                             const char *plan_json,
                             struct HlNormEstimate *out);

/**
 * Product constant `C_k` for the domain.
 *
 * # Safety
 * `d` must be live and `out` writable.
 */
enum HlStatus hl_product_constant(const struct HlDomain *d, size_t k, double *out);

/**
 * Inclusion bound `D_k` for the domain.
 *
 * # Safety
 * `d` must be live and `out` writable.
 */
enum HlStatus hl_inclusion_constant(const struct HlDomain *d, size_t k, double *out);

/**
 * `out = exp(x)` for a row-major `n × n` matrix.
 *
 * # Safety
 * `x` and `out` must each hold `n * n` doubles.
 */
enum HlStatus hl_matrix_exp(const double *x, size_t n, double *out);

/**
 * Principal logarithm for `‖g − I‖_F < 1`, else `LogDomain`.
 *
 * # Safety
 * `g` and `out` must each hold `n * n` doubles.
 */
enum HlStatus hl_matrix_log(const double *g, size_t n, double *out);

/**
 * Truncated BCH product in a built-in algebra (`so3`, `sl2`, `heisenberg`,
 * `abelian<d>`). Inputs outside `‖x‖ + ‖y‖ ≤ margin · log 2` under the
 * algebra norm fail with `OutsideConvergenceDomain`.
 *
 * # Safety
 * `algebra` must be NUL-terminated; `x`, `y`, `out` must hold `d * d` doubles
 * for the algebra's matrix size `d`.
 */
enum HlStatus hl_bch(const char *algebra,
                     const double *x,
                     const double *y,
                     size_t order,
                     double margin,
                     double *out);

/**
 * Runs suites from a JSON configuration (null for defaults). Check failures
 * are not errors: `*all_passed` reports them and the report lists them.
 *
 * # Safety
 * `config_json` null or NUL-terminated; `report_json` and `all_passed` writable.
 */
enum HlStatus hl_run_suite_json(const char *config_json, char **report_json, bool *all_passed);

/**
 * Constants table as JSON for a configuration (null for defaults).
 *
 * # Safety
 * `config_json` null or NUL-terminated; `table_json` writable.
 */
enum HlStatus hl_constants_json(const char *config_json, char **table_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOLDERLIE_H */
