#ifndef TORUSLAB_H
#define TORUSLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result codes; the nonzero library codes match the command-line exit codes.
 */
typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_INVALID_ARGUMENT = 1,
  TL_STATUS_NUMERIC_FAILURE = 2,
  TL_STATUS_CAPACITY_EXCEEDED = 3,
  TL_STATUS_NULL_POINTER = 4,
  TL_STATUS_PANIC = 5,
} TlStatus;

/**
 * Enumerated band `λ ≤ |k| < λ+ε`.
 */
typedef struct TlCluster TlCluster;

/**
 * Smooth band profile `a` with `â` supported in `(-1, 1)`.
 */
typedef struct TlMollifier TlMollifier;

/**
 * Diagonal of the mollified band projector and its pieces.
 */
typedef struct TlKernelReport {
  double total;
  double total_reassembled;
  double j;
  double i1_main;
  double i1_neighbor;
  double i2_local;
  double i22;
  double i21;
  uint64_t translates;
  double quadrature_error;
  double ratio_total;
} TlKernelReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error of this thread into `buf` (NUL terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t tl_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tl_version(void);

/**
 * Number of `k ∈ Z^n` with `λ ≤ |k| < λ+ε`.
 *
 * # Safety
 * `out` must point to a writable `u64`.
 */
enum TlStatus tl_count_band(size_t n, double lambda, double eps, uint64_t *out);

/**
 * # Safety
 * `out` must point to a writable handle pointer.
 */
enum TlStatus tl_cluster_new(size_t n, double lambda, double eps, struct TlCluster **out);

/**
 * # Safety
 * `cluster` must be null or a live handle from [`tl_cluster_new`].
 */
void tl_cluster_free(struct TlCluster *cluster);

/**
 * Number of frequencies; 0 for a null handle.
 *
 * # Safety
 * `cluster` must be null or a live handle.
 */
size_t tl_cluster_len(const struct TlCluster *cluster);

/**
 * Torus dimension; 0 for a null handle.
 *
 * # Safety
 * `cluster` must be null or a live handle.
 */
size_t tl_cluster_dim(const struct TlCluster *cluster);

/**
 * Writes frequency `index` into `out_k[0..len]`; `len` must equal the
 * dimension.
 *
 * # Safety
 * `cluster` must be a live handle and `out_k` must point to `len` writable
 * `i64`s.
 */
enum TlStatus tl_cluster_frequency(const struct TlCluster *cluster,
                                   size_t index,
                                   int64_t *out_k,
                                   size_t len);

/**
 * Schatten-`alpha` norm of the cluster compression of `h χ h̄` for a
 * seeded random trigonometric polynomial `h`; `alpha` may be `INFINITY`.
 *
 * # Safety
 * `cluster` must be a live handle, `out` a writable `f64`.
 */
enum TlStatus tl_cluster_schatten_norm(const struct TlCluster *cluster,
                                       size_t h_modes,
                                       int64_t h_max_freq,
                                       uint64_t seed,
                                       double alpha,
                                       double *out);

/**
 * # Safety
 * `out` must point to a writable handle pointer.
 */
enum TlStatus tl_mollifier_new(double sharpness, struct TlMollifier **out);

/**
 * # Safety
 * `m` must be null or a live handle from [`tl_mollifier_new`].
 */
void tl_mollifier_free(struct TlMollifier *m);

/**
 * `a(τ)`; NaN for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
double tl_mollifier_a(const struct TlMollifier *m, double tau);

/**
 * `â(t)`; NaN for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
double tl_mollifier_a_hat(const struct TlMollifier *m, double t);

/**
 * # Safety
 * `m` must be a live handle and `out` a writable [`TlKernelReport`].
 */
enum TlStatus tl_kernel_diagonal(const struct TlMollifier *m,
                                 size_t n,
                                 double lambda,
                                 double eps,
                                 struct TlKernelReport *out);

/**
 * `σ(p)` and `α(p)` for `p ≥ 2`; pass `INFINITY` for `p = ∞`.
 *
 * # Safety
 * `sigma` and `alpha` must point to writable `f64`s.
 */
enum TlStatus tl_exponents(size_t n, double p, double *sigma, double *alpha);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORUSLAB_H */
