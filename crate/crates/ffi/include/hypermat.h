#ifndef HYPERMAT_H
#define HYPERMAT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HmStatus {
  HM_STATUS_OK = 0,
  HM_STATUS_NULL_POINTER = 1,
  HM_STATUS_INVALID_INPUT = 2,
  HM_STATUS_DIMENSION_MISMATCH = 3,
  HM_STATUS_NOT_CUBICAL = 4,
  HM_STATUS_PARSE = 5,
  HM_STATUS_SIZE_CAP = 6,
  /**
   * A numerical search failed to produce a usable answer.
   */
  HM_STATUS_NUMERICAL = 7,
  HM_STATUS_IO = 8,
  /**
   * The operation needs exact (rational) entries.
   */
  HM_STATUS_NOT_EXACT = 9,
  HM_STATUS_PANIC = 10,
} HmStatus;

/**
 * Opaque simple graph on at most 64 vertices.
 */
typedef struct HmGraph HmGraph;

/**
 * Opaque tensor, exact or floating point.
 */
typedef struct HmTensor HmTensor;

/**
 * Multistart settings shared by the numerical searches.
 */
typedef struct HmSearchConfig {
  uint64_t seed;
  size_t restarts;
  size_t max_iters;
  double tol;
} HmSearchConfig;

typedef struct HmSpectralResult {
  double sigma;
  /**
   * Max-norm of the stationarity residuals at the returned triple.
   */
  double residual;
  bool converged;
  size_t best_restart;
  size_t iterations;
} HmSpectralResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hm_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void hm_string_free(char *s);

struct HmSearchConfig hm_search_config_default(void);

/**
 * Floating-point tensor from `l*m*n` entries, last index fastest.
 *
 * # Safety
 * `entries` must point to `l*m*n` doubles; `out` must be writable.
 */
enum HmStatus hm_tensor_new(size_t l,
                            size_t m,
                            size_t n,
                            const double *entries,
                            struct HmTensor **out);

/**
 * Exact tensor from integer entries, last index fastest.
 *
 * # Safety
 * `entries` must point to `l*m*n` values; `out` must be writable.
 */
enum HmStatus hm_tensor_from_integers(size_t l,
                                      size_t m,
                                      size_t n,
                                      const int64_t *entries,
                                      struct HmTensor **out);

/**
 * Parse the JSON tensor format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HmStatus hm_tensor_parse(const char *json, struct HmTensor **out);

/**
 * # Safety
 * `t` must come from this library, or be null.
 */
void hm_tensor_free(struct HmTensor *t);

/**
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_tensor_to_json(const struct HmTensor *t, char **out);

/**
 * # Safety
 * `t` must be a live handle; `dims` must hold three values.
 */
enum HmStatus hm_tensor_dims(const struct HmTensor *t, size_t *dims);

/**
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_tensor_is_exact(const struct HmTensor *t, bool *out);

/**
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_tensor_frobenius_norm(const struct HmTensor *t, double *out);

/**
 * Exact ranks of the three unfoldings.
 *
 * # Safety
 * `t` must be a live exact handle; `ranks` must hold three values.
 */
enum HmStatus hm_flattening_ranks(const struct HmTensor *t, size_t *ranks);

/**
 * Multistart estimate of the spectral norm.
 *
 * # Safety
 * `t` must be a live handle, `cfg` null (defaults) or valid, `out` writable.
 */
enum HmStatus hm_spectral_norm(const struct HmTensor *t,
                               const struct HmSearchConfig *cfg,
                               struct HmSpectralResult *out);

/**
 * Best rank-1 approximation `sigma u⊗v⊗w` with unit factors. `u`, `v`, `w`
 * must hold `l`, `m`, `n` doubles.
 *
 * # Safety
 * All pointers must be valid for the sizes above.
 */
enum HmStatus hm_best_rank1(const struct HmTensor *t,
                            const struct HmSearchConfig *cfg,
                            double *sigma,
                            double *u,
                            double *v,
                            double *w,
                            double *error);

/**
 * 2x2x2 hyperdeterminant in floating point.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_det222(const struct HmTensor *t, double *out);

/**
 * 2x2x2 hyperdeterminant of an exact tensor as a rational string.
 *
 * # Safety
 * `t` must be a live exact handle; `out` must be writable.
 */
enum HmStatus hm_det222_exact(const struct HmTensor *t, char **out);

/**
 * Whether the 2x2x2 bilinear system has a solution with `x, y, z` nonzero.
 *
 * # Safety
 * `t` must be a live exact handle; `out` must be writable.
 */
enum HmStatus hm_bilinear_solvable_222(const struct HmTensor *t, bool *out);

/**
 * Graph from `m` 0-based edge pairs stored as `edges[2*i], edges[2*i+1]`.
 *
 * # Safety
 * `edges` must hold `2*m` values; `out` must be writable.
 */
enum HmStatus hm_graph_new(size_t n, const size_t *edges, size_t m, struct HmGraph **out);

/**
 * Parse the text graph format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum HmStatus hm_graph_parse(const char *text, struct HmGraph **out);

/**
 * # Safety
 * `g` must come from this library, or be null.
 */
void hm_graph_free(struct HmGraph *g);

/**
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_graph_clique_number(const struct HmGraph *g, size_t *out);

/**
 * Maximum of `Σ x_i x_j` over edges on the simplex, as a rational string.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_graph_motzkin_straus(const struct HmGraph *g, char **out);

/**
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_graph_three_colorable(const struct HmGraph *g, bool *out);

/**
 * Clique tensor of the graph at parameter `ell` (exact).
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_clique_tensor(const struct HmGraph *g, size_t ell, struct HmTensor **out);

/**
 * Tensor whose singular-vector system is solvable iff the graph is
 * 3-colorable (exact).
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum HmStatus hm_tqf_tensor(const struct HmGraph *g, struct HmTensor **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERMAT_H */
