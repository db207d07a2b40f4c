/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef PMCF_H
#define PMCF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Linearization strategy of the nonlinear solver.
 */
typedef enum PmcfMode {
  /**
   * Jacobian at the current iterate, with step halving.
   */
  PMCF_MODE_NEWTON = 0,
  /**
   * Jacobian at the initial guess of each stage, factored once.
   */
  PMCF_MODE_FROZEN = 1,
} PmcfMode;

/**
 * Outcome of a call.
 */
typedef enum PmcfStatus {
  PMCF_STATUS_OK = 0,
  PMCF_STATUS_NULL_POINTER = 1,
  PMCF_STATUS_INVALID_PARAMETER = 2,
  PMCF_STATUS_MESH = 3,
  PMCF_STATUS_OUTSIDE_DOMAIN = 4,
  PMCF_STATUS_LINEAR_SOLVE = 5,
  PMCF_STATUS_NO_CONVERGENCE = 6,
  PMCF_STATUS_DIVERGENCE = 7,
  PMCF_STATUS_INFEASIBLE = 8,
  PMCF_STATUS_ORACLE = 9,
  PMCF_STATUS_BUFFER_TOO_SMALL = 10,
  PMCF_STATUS_IO = 11,
  PMCF_STATUS_PANIC = 12,
} PmcfStatus;

/**
 * P2 space on a boundary-fitted triangulation.
 */
typedef struct PmcfMesh PmcfMesh;

/**
 * Radial profile of the regularized problem on a disk.
 */
typedef struct PmcfProfile PmcfProfile;

/**
 * Discrete solution together with the report of its last stage.
 */
typedef struct PmcfSolution PmcfSolution;

typedef struct PmcfSolveOptions {
  enum PmcfMode mode;
  /**
   * Bound on the max-norm of the residual vector.
   */
  double tol;
  /**
   * Iterations allowed per continuation stage.
   */
  size_t max_iter;
  /**
   * Exponent of the `H^{1,mu}` norm used for contraction estimates.
   */
  double mu;
  size_t max_halvings;
} PmcfSolveOptions;

/**
 * Summary of the last continuation stage.
 */
typedef struct PmcfSolveReport {
  double epsilon;
  double h;
  double k;
  size_t iterations;
  double final_residual;
  /**
   * Largest step contraction estimate; NaN with fewer than two steps.
   */
  double contraction_max;
  /**
   * Ellipticity bounds of the Hessian of the regularized integrand.
   */
  double lambda_min;
  double lambda_max;
} PmcfSolveReport;

typedef struct PmcfRates {
  double k;
  double alpha;
  double gamma;
  double s;
  double r;
  double beta1;
  double beta2;
  double gamma_gap;
  double beta_gap;
  double r_gap;
  /**
   * The optimum sits at the upper end of the searched gamma range.
   */
  bool at_gamma_max;
} PmcfRates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, NUL-terminated name of a status code.
 */
const char *pmcf_status_name(enum PmcfStatus status);

/**
 * Copies the message of the most recent failure on this thread into `buf`
 * (truncated, always NUL-terminated when `len > 0`) and returns the full
 * message length without the terminator; 0 when the last call succeeded.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t pmcf_last_error_message(char *buf, size_t len);

/**
 * Polar mesh of the disk of `radius` centred at the origin.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum PmcfStatus pmcf_mesh_disk(double radius, double target_h, struct PmcfMesh **out);

/**
 * Mesh of the ellipse with semi-axes `a` (along x) and `b`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum PmcfStatus pmcf_mesh_ellipse(double a, double b, double target_h, struct PmcfMesh **out);

/**
 * # Safety
 * `mesh` must be null or a pointer from a `pmcf_mesh_*` constructor that
 * has not been freed yet.
 */
void pmcf_mesh_free(struct PmcfMesh *mesh);

/**
 * # Safety
 * `mesh` must be null or a live mesh handle; `out` null or writable.
 */
enum PmcfStatus pmcf_mesh_vertex_count(const struct PmcfMesh *mesh, size_t *out);

/**
 * # Safety
 * `mesh` must be null or a live mesh handle; `out` null or writable.
 */
enum PmcfStatus pmcf_mesh_triangle_count(const struct PmcfMesh *mesh, size_t *out);

/**
 * Number of P2 degrees of freedom (vertices plus edge midpoints).
 *
 * # Safety
 * `mesh` must be null or a live mesh handle; `out` null or writable.
 */
enum PmcfStatus pmcf_mesh_dof_count(const struct PmcfMesh *mesh, size_t *out);

/**
 * Longest edge.
 *
 * # Safety
 * `mesh` must be null or a live mesh handle; `out` null or writable.
 */
enum PmcfStatus pmcf_mesh_h(const struct PmcfMesh *mesh, double *out);

/**
 * Largest boundary deviation of the discrete boundary divided by `h^2`.
 *
 * # Safety
 * `mesh` must be null or a live mesh handle; `out` null or writable.
 */
enum PmcfStatus pmcf_mesh_sandwich_constant(const struct PmcfMesh *mesh, double *out);

/**
 * Defaults: Newton, `tol = 1e-10`, 50 iterations, `mu = 3`, 10 halvings.
 */
struct PmcfSolveOptions pmcf_solve_options_default(void);

/**
 * Continuation solve on a fixed mesh, starting from zero and passing each
 * stage's solution to the next; the last entry of `schedule` is the target
 * regularization parameter.
 *
 * # Safety
 * `mesh` must be null or a live mesh handle, `schedule` must point to
 * `schedule_len` doubles, `options` may be null (defaults) or point to a
 * valid `PmcfSolveOptions` whose `mode` is a listed `PmcfMode` value, and
 * `out` must be null or writable.
 */
enum PmcfStatus pmcf_solve(const struct PmcfMesh *mesh, double k, const double *schedule, size_t schedule_len, const struct PmcfSolveOptions *options, struct PmcfSolution **out);

/**
 * # Safety
 * `solution` must be null or a pointer from [`pmcf_solve`] that has not
 * been freed yet.
 */
void pmcf_solution_free(struct PmcfSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live solution handle; `out` null or writable.
 */
enum PmcfStatus pmcf_solution_dof_count(const struct PmcfSolution *solution, size_t *out);

/**
 * Copies the nodal coefficients (dof order: vertices, then edge midpoints)
 * into `buf`, which must hold at least the dof count.
 *
 * # Safety
 * `solution` must be null or a live solution handle; `buf` must be null or
 * point to `len` writable doubles.
 */
enum PmcfStatus pmcf_solution_coefficients(const struct PmcfSolution *solution, double *buf, size_t len);

/**
 * Value of the discrete solution at `(x, y)`.
 *
 * # Safety
 * `solution` must be null or a live solution handle; `out` null or writable.
 */
enum PmcfStatus pmcf_solution_evaluate(const struct PmcfSolution *solution, double x, double y, double *out);

/**
 * # Safety
 * `solution` must be null or a live solution handle; `out` null or writable.
 */
enum PmcfStatus pmcf_solution_report(const struct PmcfSolution *solution, struct PmcfSolveReport *out);

/**
 * Solves the radial problem on the disk of `radius` to `tol` (at most 1e-8).
 *
 * # Safety
 * `out` must be null or writable.
 */
enum PmcfStatus pmcf_profile_solve(double k, double epsilon, double radius, double tol, struct PmcfProfile **out);

/**
 * # Safety
 * `profile` must be null or a pointer from [`pmcf_profile_solve`] that has
 * not been freed yet.
 */
void pmcf_profile_free(struct PmcfProfile *profile);

/**
 * Profile value at the distance `r` from the centre, `0 <= r <= radius`.
 *
 * # Safety
 * `profile` must be null or a live profile handle; `out` null or writable.
 */
enum PmcfStatus pmcf_profile_value(const struct PmcfProfile *profile, double r, double *out);

/**
 * Richardson estimate of the profile's nodal error.
 *
 * # Safety
 * `profile` must be null or a live profile handle; `out` null or writable.
 */
enum PmcfStatus pmcf_profile_error_estimate(const struct PmcfProfile *profile, double *out);

/**
 * Arrival time of the power mean curvature flow from the circle of
 * `radius`, evaluated at `(x, y)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum PmcfStatus pmcf_exact_disk_arrival_time(double k, double radius, double x, double y, double *out);

/**
 * The two exponents whose difference governs the rate constraints.
 *
 * # Safety
 * `beta1` and `beta2` must be null or writable.
 */
enum PmcfStatus pmcf_beta_exponents(double k, double alpha, double gamma, double s, double *beta1, double *beta2);

/**
 * Rate exponents maximizing `min(r, s)` over `gamma` in `(1 + k, gamma_max]`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum PmcfStatus pmcf_rates_optimize(double k, double gamma_max, double margin, struct PmcfRates *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PMCF_H */
