#ifndef KHESS_H
#define KHESS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum KhessStatus {
  KHESS_STATUS_OK = 0,
  KHESS_STATUS_INVALID_ARGUMENT = 1,
  KHESS_STATUS_DOMAIN_ERROR = 2,
  KHESS_STATUS_DEGENERATE_SPECTRUM = 3,
  KHESS_STATUS_NON_CONVERGENCE = 4,
  KHESS_STATUS_CONE_VIOLATION = 5,
  KHESS_STATUS_IO_ERROR = 6,
  KHESS_STATUS_INTERNAL_ERROR = 7,
} KhessStatus;

/**
 * Opaque solver result: the solved field plus its report.
 */
typedef struct KhessSolution KhessSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent error on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *khess_last_error_message(void);

/**
 * sigma_k of the spectrum `values[0..n]`.
 *
 * # Safety
 * `values` must point to `n` readable doubles and `out` to a writable one.
 */
enum KhessStatus khess_sigma(const double *values, size_t n, size_t k, double *out);

/**
 * First partial d sigma_k / d lam_i (0-based i).
 *
 * # Safety
 * `values` must point to `n` readable doubles and `out` to a writable one.
 */
enum KhessStatus khess_sigma_d1(const double *values, size_t n, size_t k, size_t i, double *out);

/**
 * Second partial d^2 sigma_k / d lam_p d lam_q (0-based p, q).
 *
 * # Safety
 * `values` must point to `n` readable doubles and `out` to a writable one.
 */
enum KhessStatus khess_sigma_d2(const double *values,
                                size_t n,
                                size_t k,
                                size_t p,
                                size_t q,
                                double *out);

/**
 * Largest m such that the spectrum lies in the open cone Gamma_m
 * (0 when even sigma_1 is nonpositive).
 *
 * # Safety
 * `values` must point to `n` readable doubles and `out` to a writable usize.
 */
enum KhessStatus khess_cone_max_level(const double *values, size_t n, size_t *out);

/**
 * Admissibility shift K0 = n * sup_f^{1/k}.
 *
 * # Safety
 * `out` must point to a writable double.
 */
enum KhessStatus khess_shift_bound(double sup_f, size_t n, size_t k, double *out);

/**
 * Gap of the Newton-Maclaurin bound on the spectrum (nonnegative on
 * Gamma_k).
 *
 * # Safety
 * `values` must point to `n` readable doubles and `out` to a writable one.
 */
enum KhessStatus khess_newton_maclaurin_gap(const double *values, size_t n, size_t k, double *out);

/**
 * Solves sigma_k(D^2 u) = f_const on the cube [low, high]^dim with zero
 * boundary data. On success writes a heap handle to `out`; free it with
 * [`khess_solution_free`].
 *
 * # Safety
 * `out` must point to a writable pointer slot.
 */
enum KhessStatus khess_solve_box_dirichlet(size_t dim,
                                           double low,
                                           double high,
                                           size_t resolution,
                                           size_t k,
                                           double f_const,
                                           double tol,
                                           size_t max_iter,
                                           struct KhessSolution **out);

/**
 * Number of grid nodes of the solution.
 *
 * # Safety
 * `solution` must be a live handle from [`khess_solve_box_dirichlet`].
 */
size_t khess_solution_node_count(const struct KhessSolution *solution);

/**
 * Newton iterations performed.
 *
 * # Safety
 * `solution` must be a live handle from [`khess_solve_box_dirichlet`].
 */
size_t khess_solution_iterations(const struct KhessSolution *solution);

/**
 * Final max-norm residual.
 *
 * # Safety
 * `solution` must be a live handle from [`khess_solve_box_dirichlet`].
 */
double khess_solution_final_residual(const struct KhessSolution *solution);

/**
 * Copies the node values (row-major, last axis fastest) into `out[0..len]`.
 * `len` must equal the node count.
 *
 * # Safety
 * `solution` must be a live handle and `out` must point to `len` writable
 * doubles.
 */
enum KhessStatus khess_solution_values(const struct KhessSolution *solution,
                                       double *out,
                                       size_t len);

/**
 * Writes the solution in the `khess-field v1` format.
 *
 * # Safety
 * `solution` must be a live handle and `path` a NUL-terminated UTF-8 string.
 */
enum KhessStatus khess_solution_write_field(const struct KhessSolution *solution, const char *path);

/**
 * Frees a solution handle. Null is a no-op.
 *
 * # Safety
 * `solution` must be a handle from [`khess_solve_box_dirichlet`] that has
 * not been freed yet.
 */
void khess_solution_free(struct KhessSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KHESS_H */
