/* C API for the q-calculus and q-order-statistics toolkit. */

#ifndef QORDERSTATS_H
#define QORDERSTATS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every C-ABI call.
typedef enum QosStatus {
  QOS_STATUS_OK = 0,
  QOS_STATUS_NULL_POINTER = 1,
  QOS_STATUS_DOMAIN = 2,
  QOS_STATUS_SIZE = 3,
  QOS_STATUS_NUMERIC = 4,
  QOS_STATUS_UNSUPPORTED = 5,
  QOS_STATUS_INSUFFICIENT_ACCEPTANCE = 6,
  QOS_STATUS_PANIC = 7,
} QosStatus;

// Base selector for q-binomial/q-multinomial coefficients.
typedef enum QosBase {
  QOS_BASE_NORMAL = 0,
  QOS_BASE_INVERSE = 1,
} QosBase;

// Univariate order-statistic selector; `k` rides alongside where needed.
typedef enum QosStatistic {
  QOS_STATISTIC_MAX = 0,
  QOS_STATISTIC_MIN = 1,
  QOS_STATISTIC_KTH = 2,
} QosStatistic;

// Distribution vs density selector for the joint laws.
typedef enum QosJointKind {
  QOS_JOINT_CDF = 0,
  QOS_JOINT_PDF = 1,
} QosJointKind;

// Opaque deformation-parameter handle.
typedef struct QosParams QosParams;

// Scalar callback used by the q-derivative and q-integral entry points:
// called with the evaluation point and the caller's context pointer.
typedef double (*QosRealFn)(double x, void *user);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; empty string if none.
// The pointer stays valid until the next failing call on the same thread.
const char *qos_last_error_message(void);

// Create a parameter handle: `q` strictly inside (0, 1), `eps > 0` the
// series-truncation threshold, `max_terms >= 1` the hard term cap.
//
// # Safety
// `out` must point to writable storage for one pointer.
enum QosStatus qos_params_new(double q, double eps, uintptr_t max_terms, struct QosParams **out);

// Create a parameter handle with the default truncation policy.
//
// # Safety
// `out` must point to writable storage for one pointer.
enum QosStatus qos_params_default(double q, struct QosParams **out);

// Release a handle from [`qos_params_new`]; a null pointer is a no-op.
//
// # Safety
// `params` must be null or a pointer previously returned by a constructor
// and not yet freed.
void qos_params_free(struct QosParams *params);

// `[n]_q = (1 - q^n)/(1 - q)`.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_q_number(const struct QosParams *params, uint32_t n, double *out);

// `[n]_q!`.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_q_factorial(const struct QosParams *params, uint32_t n, double *out);

// q-binomial coefficient; out-of-range `k` yields 0.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_q_binomial(const struct QosParams *params,
                              int64_t n,
                              int64_t k,
                              enum QosBase base,
                              double *out);

// q-multinomial coefficient over `parts[0..parts_len]`.
//
// # Safety
// `params` must be a live handle; `parts` must point to `parts_len`
// readable entries; `out` must be writable.
enum QosStatus qos_q_multinomial(const struct QosParams *params,
                                 uint32_t n,
                                 const uint32_t *parts,
                                 uintptr_t parts_len,
                                 enum QosBase base,
                                 double *out);

// q-shifted factorial `(a; q)_n`; pass `n < 0` for the infinite product.
// `out_tail` (optional) receives the truncation tail bound.
//
// # Safety
// `params` must be a live handle; `out` must be writable; `out_tail` may
// be null.
enum QosStatus qos_q_shifted_factorial(const struct QosParams *params,
                                       double a,
                                       int64_t n,
                                       double *out,
                                       double *out_tail);

// q-exponential `e_q(z)`; positive `z` must stay below `1/(1-q)`.
//
// # Safety
// `params` must be a live handle; `out` must be writable; `out_tail` may
// be null.
enum QosStatus qos_q_exponential(const struct QosParams *params,
                                 double z,
                                 double *out,
                                 double *out_tail);

// q-difference quotient `(f(x) - f(qx)) / ((1-q) x)`; undefined at `x = 0`.
//
// # Safety
// `params` must be a live handle; `f` must be callable with `user`; `out`
// must be writable.
enum QosStatus qos_q_derivative(const struct QosParams *params,
                                QosRealFn f,
                                void *user,
                                double x,
                                double *out);

// Jackson q-integral of `f` over `[a, b]`; pass `b = INFINITY` for the
// improper integral from 0.
//
// # Safety
// `params` must be a live handle; `f` must be callable with `user`; `out`
// must be writable; `out_tail` may be null.
enum QosStatus qos_q_integrate(const struct QosParams *params,
                               QosRealFn f,
                               void *user,
                               double a,
                               double b,
                               double *out,
                               double *out_tail);

// q-uniform density, distribution, r-th moment, and q-variance.
//
// # Safety
// `params` must be a live handle; the out pointers must be writable.
enum QosStatus qos_quniform_pdf(const struct QosParams *params, double beta, double x, double *out);

// See [`qos_quniform_pdf`].
//
// # Safety
// Same contract as [`qos_quniform_pdf`].
enum QosStatus qos_quniform_cdf(const struct QosParams *params, double beta, double x, double *out);

// See [`qos_quniform_pdf`].
//
// # Safety
// Same contract as [`qos_quniform_pdf`].
enum QosStatus qos_quniform_moment(const struct QosParams *params,
                                   double beta,
                                   uint32_t r,
                                   double *out);

// See [`qos_quniform_pdf`].
//
// # Safety
// Same contract as [`qos_quniform_pdf`].
enum QosStatus qos_quniform_variance(const struct QosParams *params, double beta, double *out);

// Fill `out[0..len]` with q-uniform samples drawn from the given seed;
// every sample is an exact Fermat atom `beta q^n`.
//
// # Safety
// `params` must be a live handle; `out` must point to `len` writable
// doubles.
enum QosStatus qos_quniform_sample_fill(const struct QosParams *params,
                                        double beta,
                                        uint64_t seed,
                                        double *out,
                                        uintptr_t len);

// Closed-form q-distribution function of the max/min/k-th q-ordered
// variable of `nu` dependent q-uniform variables on scale `t`; `k` is
// consulted only for `QOS_STATISTIC_KTH`.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_unif_ord_cdf(const struct QosParams *params,
                                uint32_t nu,
                                enum QosStatistic which,
                                uint32_t k,
                                double t,
                                double y,
                                double *out);

// Matching q-density; see [`qos_unif_ord_cdf`].
//
// # Safety
// Same contract as [`qos_unif_ord_cdf`].
enum QosStatus qos_unif_ord_pdf(const struct QosParams *params,
                                uint32_t nu,
                                enum QosStatistic which,
                                uint32_t k,
                                double t,
                                double y,
                                double *out);

// Joint law of `(min, max)` at `(y, z)` on the support `y < q^{nu-1} z`.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_unif_joint_minmax(const struct QosParams *params,
                                     uint32_t nu,
                                     enum QosJointKind kind,
                                     double t,
                                     double y,
                                     double z,
                                     double *out);

// Joint law of `(Y_(k), Y_(r))` at `(y, z)` on the support `y < q^{r-k} z`.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_unif_joint_kr(const struct QosParams *params,
                                 uint32_t nu,
                                 uint32_t k,
                                 uint32_t r,
                                 enum QosJointKind kind,
                                 double t,
                                 double y,
                                 double z,
                                 double *out);

// The constant the full ordered joint density takes on its support chain.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_unif_joint_full_constant(const struct QosParams *params,
                                            uint32_t nu,
                                            double t,
                                            double *out);

// Full ordered joint density at `ys[0..len]` (ascending coordinates):
// the constant on the q-ordered chain, 0 outside it.
//
// # Safety
// `params` must be a live handle; `ys` must point to `len` readable
// doubles; `out` must be writable.
enum QosStatus qos_unif_joint_full_pdf(const struct QosParams *params,
                                       double t,
                                       const double *ys,
                                       uintptr_t len,
                                       double *out);

// Whether `ys[0..len]` satisfies the strict q-ordered interleaving chain
// with upper bound `t`.
//
// # Safety
// `params` must be a live handle; `ys` must point to `len` readable
// doubles; `out` must be writable.
enum QosStatus qos_support_check(const struct QosParams *params,
                                 double t,
                                 const double *ys,
                                 uintptr_t len,
                                 bool *out);

// Probability of one arrival in geometric interval `k` (1-based) of the
// Heine process.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_heine_interval_prob(const struct QosParams *params,
                                       double lambda,
                                       double t,
                                       uint32_t k,
                                       double *out);

// Heine pmf `P(X(t) = k)` with the truncation tail bound.
//
// # Safety
// `params` must be a live handle; `out` must be writable; `out_tail` may
// be null.
enum QosStatus qos_heine_pmf(const struct QosParams *params,
                             double lambda,
                             double t,
                             uint32_t k,
                             double *out,
                             double *out_tail);

// Poisson-binomial DP oracle: fills `out[0..=kmax]` with the exact count
// distribution over `depth` intervals; `out_tail` (optional) receives the
// unresolved arrival mass below the depth.
//
// # Safety
// `params` must be a live handle; `out` must point to `kmax + 1` writable
// doubles; `out_tail` may be null.
enum QosStatus qos_heine_pmf_dp(const struct QosParams *params,
                                double lambda,
                                double t,
                                uint32_t depth,
                                uint32_t kmax,
                                double *out,
                                double *out_tail);

// Exact conditional probability of the waiting-time configuration given
// `X(t) = nu`; equals `[nu]_q! (1-q)^nu`.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_heine_conditional_config_prob(const struct QosParams *params,
                                                 double lambda,
                                                 double t,
                                                 uint32_t nu,
                                                 uint32_t depth,
                                                 double *out);

// Conditional waiting-time density `[nu]_q! / (q^{binom(nu,2)} t^nu)`.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_heine_conditional_density(const struct QosParams *params,
                                             double t,
                                             uint32_t nu,
                                             double *out);

// Simulate one Heine run from the seed and return the arrival count over
// `depth` intervals.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum QosStatus qos_heine_simulate_count(const struct QosParams *params,
                                        double lambda,
                                        double t,
                                        uint32_t depth,
                                        uint64_t seed,
                                        uint32_t *out);

// Run the full verification suite; `out_failed` receives the number of
// asserted checks that failed (0 means everything passed).
//
// # Safety
// `out_failed` must be writable.
enum QosStatus qos_verify(uint64_t seed, uint64_t trials, uint64_t *out_failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QORDERSTATS_H */
