#ifndef ASOTA_H
#define ASOTA_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AsotaStatus {
  ASOTA_STATUS_OK = 0,
  ASOTA_STATUS_NULL_POINTER = 1,
  ASOTA_STATUS_INVALID_ARGUMENT = 2,
  ASOTA_STATUS_DATA_ERROR = 3,
  ASOTA_STATUS_NUMERIC_ERROR = 4,
  ASOTA_STATUS_BUFFER_TOO_SMALL = 5,
  ASOTA_STATUS_PANIC = 6,
} AsotaStatus;

typedef enum AsotaVariant {
  ASOTA_VARIANT_COUNT = 0,
  ASOTA_VARIANT_EW = 1,
  ASOTA_VARIANT_AW = 2,
  ASOTA_VARIANT_EWE = 3,
  ASOTA_VARIANT_AWE = 4,
  ASOTA_VARIANT_EWR = 5,
  ASOTA_VARIANT_AWR = 6,
} AsotaVariant;

/**
 * Parsed benchmark corpus.
 */
typedef struct AsotaCorpus AsotaCorpus;

/**
 * Daily index variants plus the standardized series when it is defined.
 */
typedef struct AsotaIndex AsotaIndex;

typedef struct AsotaPowerFit {
  double alpha_prime;
  double prefactor;
  double residual_norm;
} AsotaPowerFit;

typedef struct AsotaJointFit {
  double l_min;
  double b;
  double beta;
  double g;
  double gamma;
  double residual_norm;
  bool converged;
} AsotaJointFit;

typedef struct AsotaCorpusCounts {
  size_t total_combos;
  size_t combos_with_entries;
  size_t combos_with_10_plus;
  size_t rejected_lines;
} AsotaCorpusCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *asota_last_error(void);

/**
 * Output doubling time in years. Pass `INFINITY` for a factor that stays constant.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `double`.
 */
enum AsotaStatus asota_doubling_time(double alpha, double k_years, double l_years, double *out);

/**
 * Implicit depreciation from consecutive-year stock and investment arrays.
 * `out[0]` is NaN; `out[i]` is the rate for year `i`.
 *
 * # Safety
 * Each pointer must reference `n` doubles.
 */
enum AsotaStatus asota_implicit_depreciation(const double *net_stock,
                                             const double *investment,
                                             size_t n,
                                             double *out);

/**
 * Perpetual-inventory stock with `out[0] = k0` and `out[i]` built from
 * `investment[i]` and `delta[i]` for `i >= 1`.
 *
 * # Safety
 * Each pointer must reference `n` doubles.
 */
enum AsotaStatus asota_accumulate_capital(const double *investment,
                                          const double *delta,
                                          size_t n,
                                          double k0,
                                          double *out);

/**
 * Fits the mean log productivity on aligned log series.
 *
 * # Safety
 * Input pointers must reference `n` doubles; outputs one double each.
 */
enum AsotaStatus asota_fit_mean_log_a(const double *log_y,
                                      const double *log_k,
                                      const double *log_l,
                                      size_t n,
                                      double alpha,
                                      double *out_mean_log_a,
                                      double *out_r2);

/**
 * Log-log fit of `Y = a * C^alpha'`.
 *
 * # Safety
 * `c` and `y` must reference `n` doubles; `out` one struct.
 */
enum AsotaStatus asota_fit_power_law(const double *c,
                                     const double *y,
                                     size_t n,
                                     struct AsotaPowerFit *out);

/**
 * Fits `L = L_min + B / D^beta + G / P^gamma`.
 *
 * # Safety
 * `d`, `p`, `l` must reference `n` doubles; `out` one struct.
 */
enum AsotaStatus asota_fit_joint_loss(const double *d,
                                      const double *p,
                                      const double *l,
                                      size_t n,
                                      struct AsotaJointFit *out);

/**
 * Compute-optimal dataset size and parameter count for compute `c` and pass factor `t`.
 *
 * # Safety
 * `fit` must point to a valid struct; outputs one double each.
 */
enum AsotaStatus asota_optimal_allocation(const struct AsotaJointFit *fit,
                                          double c,
                                          double t,
                                          double *out_d,
                                          double *out_p);

/**
 * Compute exponent implied by nearly equal loss exponents.
 *
 * # Safety
 * `fit` must point to a valid struct; `out` one double.
 */
enum AsotaStatus asota_effective_alpha(const struct AsotaJointFit *fit,
                                       double tolerance,
                                       double *out);

/**
 * Parses CSV or JSON-lines records with an orientation table (`metric_name,kind` CSV).
 *
 * # Safety
 * Both strings must be NUL-terminated; `out` must point to writable storage for a handle.
 */
enum AsotaStatus asota_corpus_parse(const char *records,
                                    const char *orientation,
                                    struct AsotaCorpus **out);

/**
 * # Safety
 * `corpus` must be a live handle; `out` one struct.
 */
enum AsotaStatus asota_corpus_counts(const struct AsotaCorpus *corpus,
                                     struct AsotaCorpusCounts *out);

/**
 * # Safety
 * `corpus` must be null or a handle from [`asota_corpus_parse`] not yet freed.
 */
void asota_corpus_free(struct AsotaCorpus *corpus);

/**
 * Runs the daily index engine over a corpus.
 *
 * # Safety
 * `corpus` must be a live handle; `out` writable storage for a handle.
 */
enum AsotaStatus asota_index_compute(const struct AsotaCorpus *corpus,
                                     bool strict_formula,
                                     struct AsotaIndex **out);

/**
 * Number of days on the index grid.
 *
 * # Safety
 * `index` must be null or a live handle.
 */
size_t asota_index_len(const struct AsotaIndex *index);

/**
 * First grid day as days since 1970-01-01.
 *
 * # Safety
 * `index` must be a live handle; `out` one value.
 */
enum AsotaStatus asota_index_start(const struct AsotaIndex *index, int64_t *out);

/**
 * Copies one variant's daily series into `out`, which must hold [`asota_index_len`] values.
 *
 * # Safety
 * `index` must be a live handle; `out` must reference `len` doubles.
 */
enum AsotaStatus asota_index_values(const struct AsotaIndex *index,
                                    enum AsotaVariant variant,
                                    double *out,
                                    size_t len);

/**
 * Copies the standardized log index; fails with `NUMERIC_ERROR` when the
 * normalization is undefined. `out_base` receives the base day (days since 1970-01-01).
 *
 * # Safety
 * `index` must be a live handle; `out` must reference `len` doubles; `out_base` one value.
 */
enum AsotaStatus asota_index_asota(const struct AsotaIndex *index,
                                   double *out,
                                   size_t len,
                                   int64_t *out_base);

/**
 * # Safety
 * `index` must be null or a handle from [`asota_index_compute`] not yet freed.
 */
void asota_index_free(struct AsotaIndex *index);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ASOTA_H */
