#ifndef BERNOULLI_ACTION_H
#define BERNOULLI_ACTION_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BqaStatus {
  BQA_STATUS_OK = 0,
  BQA_STATUS_NULL_POINTER = 1,
  BQA_STATUS_INVALID_ARGUMENT = 2,
  // Pole or endpoint of the parameter domain.
  BQA_STATUS_DOMAIN = 3,
  BQA_STATUS_SINGULAR = 4,
  BQA_STATUS_IO = 5,
  BQA_STATUS_PARSE = 6,
  BQA_STATUS_PANIC = 7,
} BqaStatus;

// Opaque linear operator.
typedef struct BqaOperator BqaOperator;

// Opaque precomputed matrix action for one operator and vector.
typedef struct BqaPlan BqaPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the thread.
const char *bqa_last_error_message(void);

// `q(tau, w) = w e^{w tau} / (e^w - 1)`.
//
// # Safety
// `out_re` and `out_im` must be valid for writes.
enum BqaStatus bqa_reference_q(double tau,
                               double w_re,
                               double w_im,
                               double *out_re,
                               double *out_im);

// Order-`p` expansion with `modes` Fourier modes.
//
// # Safety
// `out_re` and `out_im` must be valid for writes.
enum BqaStatus bqa_g_approx(size_t order,
                            size_t modes,
                            double tau,
                            double w_re,
                            double w_im,
                            double *out_re,
                            double *out_im);

// Expansion with `depth` correction levels.
//
// # Safety
// `out_re` and `out_im` must be valid for writes.
enum BqaStatus bqa_G_approx(size_t order,
                            size_t modes,
                            size_t depth,
                            double tau,
                            double w_re,
                            double w_im,
                            double *out_re,
                            double *out_im);

// Tridiagonal operator of size `n`; `sub` and `sup` hold `n - 1` entries.
//
// # Safety
// The arrays must hold the stated lengths; `out` must be valid for writes.
enum BqaStatus bqa_operator_new_tridiagonal(size_t n,
                                            const double *sub,
                                            const double *diag,
                                            const double *sup,
                                            struct BqaOperator **out);

// Dense operator from `n * n` row-major entries.
//
// # Safety
// `entries` must hold `n * n` values; `out` must be valid for writes.
enum BqaStatus bqa_operator_new_dense(size_t n, const double *entries, struct BqaOperator **out);

// Reads a Matrix Market coordinate file.
//
// # Safety
// `path` must be a nul-terminated string; `out` must be valid for writes.
enum BqaStatus bqa_operator_from_matrix_market(const char *path, struct BqaOperator **out);

// # Safety
// `op` must be a live handle; `out` must be valid for writes.
enum BqaStatus bqa_operator_dim(const struct BqaOperator *op, size_t *out);

// # Safety
// `op` must be null or a handle not yet freed.
void bqa_operator_free(struct BqaOperator *op);

// Factors every shifted system needed for `q(tau, A) f` at any `tau`.
//
// # Safety
// `op` must be a live handle, `f` must hold `len` values and `out` must be
// valid for writes.
enum BqaStatus bqa_plan_new(const struct BqaOperator *op,
                            size_t order,
                            size_t modes,
                            size_t depth,
                            const double *f,
                            size_t len,
                            struct BqaPlan **out);

// Writes the action at `tau` into `out[0..len]`.
//
// # Safety
// `plan` must be a live handle and `out` valid for `len` writes.
enum BqaStatus bqa_plan_eval(const struct BqaPlan *plan, double tau, double *out, size_t len);

// Number of shifted solves performed while building the plan.
//
// # Safety
// `plan` must be a live handle; `out` must be valid for writes.
enum BqaStatus bqa_plan_solve_count(const struct BqaPlan *plan, size_t *out);

// # Safety
// `plan` must be null or a handle not yet freed.
void bqa_plan_free(struct BqaPlan *plan);

// Dense reference `(e^A - I)^{-1} e^{tau A} A f`.
//
// # Safety
// `op` must be a live handle; `f` and `out` must hold `len` values.
enum BqaStatus bqa_reference_solution(const struct BqaOperator *op,
                                      double tau,
                                      const double *f,
                                      size_t len,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BERNOULLI_ACTION_H */
