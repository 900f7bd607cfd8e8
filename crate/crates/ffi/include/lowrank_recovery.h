#ifndef LOWRANK_RECOVERY_H
#define LOWRANK_RECOVERY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum LrStatus {
  LR_STATUS_OK = 0,
  LR_STATUS_NULL_POINTER = 1,
  LR_STATUS_INVALID_ARGUMENT = 2,
  LR_STATUS_DIMENSION_MISMATCH = 3,
  // The solver ran out of iterations; outputs hold the last iterate.
  LR_STATUS_NOT_CONVERGED = 4,
  // The instance lies outside the regime where the quantity is defined.
  LR_STATUS_REGIME = 5,
  LR_STATUS_NUMERICAL_FAILURE = 6,
  LR_STATUS_PANIC = 7,
} LrStatus;

typedef enum LrNormKind {
  LR_NORM_KIND_FROBENIUS = 0,
  LR_NORM_KIND_SPECTRAL = 1,
  LR_NORM_KIND_NUCLEAR = 2,
  LR_NORM_KIND_LINF = 3,
  LR_NORM_KIND_L1 = 4,
} LrNormKind;

// Opaque dense matrix (row-major, finite entries).
typedef struct LrMatrix LrMatrix;

// Opaque index set.
typedef struct LrSupport LrSupport;

// Convergence summary filled in by the solvers.
typedef struct LrSolveInfo {
  size_t iterations;
  bool converged;
  double feas_residual;
  double step_size;
  size_t final_rank;
} LrSolveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success. The pointer
// stays valid until the next call into this library on the same thread.
const char *lr_last_error_message(void);

// Creates a `rows x cols` matrix from `rows * cols` row-major values. `data` may be null
// for a zero matrix.
//
// # Safety
// `data` must be null or point to `rows * cols` readable doubles; `out` must be writable.
enum LrStatus lr_matrix_new(size_t rows, size_t cols, const double *data, struct LrMatrix **out);

// # Safety
// `m` must be null or a handle from this library that has not been freed.
void lr_matrix_free(struct LrMatrix *m);

// Row count, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t lr_matrix_rows(const struct LrMatrix *m);

// Column count, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t lr_matrix_cols(const struct LrMatrix *m);

// Copies the row-major entries into `out`, which must hold exactly `len = rows * cols`.
//
// # Safety
// `m` must be a live handle and `out` must point to `len` writable doubles.
enum LrStatus lr_matrix_copy_data(const struct LrMatrix *m, double *out, size_t len);

// Creates an index set from `len` 0-based `(row_idx[k], col_idx[k])` pairs. Duplicates and
// out-of-range pairs are rejected.
//
// # Safety
// `row_idx` and `col_idx` must point to `len` readable values (or be null when `len` is 0);
// `out` must be writable.
enum LrStatus lr_support_new(size_t rows,
                             size_t cols,
                             const size_t *row_idx,
                             const size_t *col_idx,
                             size_t len,
                             struct LrSupport **out);

// # Safety
// `s` must be null or a live handle.
void lr_support_free(struct LrSupport *s);

// Number of indices, or 0 for a null handle.
//
// # Safety
// `s` must be null or a live handle.
size_t lr_support_len(const struct LrSupport *s);

// # Safety
// `m` must be a live handle and `out` writable.
enum LrStatus lr_matrix_norm(const struct LrMatrix *m, enum LrNormKind kind, double *out);

// `(4/p) ‖P_Ω M‖_F` from observed data.
//
// # Safety
// Handles must be live and `out` writable.
enum LrStatus lr_mc_tau_bound_data(const struct LrMatrix *observed,
                                   const struct LrSupport *omega,
                                   double *out);

// Matrix completion at penalty `tau`. `max_iters = 0` and `feas_tol <= 0` select the
// defaults (5000, 1e-6). On `LR_STATUS_NOT_CONVERGED`, `*out_x` still receives the last
// iterate and must be freed. `info` may be null.
//
// # Safety
// Handles must be live; `out_x` writable; `info` null or writable.
enum LrStatus lr_mc_solve(const struct LrMatrix *observed,
                          const struct LrSupport *omega,
                          double tau,
                          size_t max_iters,
                          double feas_tol,
                          struct LrMatrix **out_x,
                          struct LrSolveInfo *info);

// `(2‖D‖_∞ + λ(√15/3)‖D‖_F) / (λ(1−λ))`.
//
// # Safety
// `d` must be live and `out` writable.
enum LrStatus lr_rpca_tau_bound_data(const struct LrMatrix *d, double lambda, double *out);

// Robust PCA at `(lambda, tau)`. Defaults and the not-converged contract follow
// `lr_mc_solve` (default `feas_tol` 1e-7).
//
// # Safety
// `d` must be live; `out_l`, `out_s` writable; `info` null or writable.
enum LrStatus lr_rpca_solve(const struct LrMatrix *d,
                            double lambda,
                            double tau,
                            size_t max_iters,
                            double feas_tol,
                            struct LrMatrix **out_l,
                            struct LrMatrix **out_s,
                            struct LrSolveInfo *info);

// `1/√max(n1, n2)`.
double lr_default_lambda(size_t n1, size_t n2);

// `ε = (δ/2 + γ/4)/(γ/(2λ) + δ)`. `out_tau` (nullable) receives the equalized penalty.
//
// # Safety
// `out_epsilon` must be writable; `out_tau` null or writable.
enum LrStatus lr_optimal_epsilon(double gamma,
                                 double delta,
                                 double lambda,
                                 double *out_epsilon,
                                 double *out_tau);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOWRANK_RECOVERY_H */
