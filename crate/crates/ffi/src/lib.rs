//! C interface to `pmcf-core`.
//!
//! Meshes, discrete solutions and radial profiles are handed out as opaque
//! pointers that the caller releases with the matching `*_free` function.
//! Every fallible call returns a [`PmcfStatus`]; on failure a description is
//! kept per thread and can be copied out with [`pmcf_last_error_message`].
//! Results are written through caller-provided out-pointers, which are left
//! untouched when the call fails.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use pmcf_core::fe::{FeFunction, P2Space};
use pmcf_core::geometry::{build_mesh, sandwich_constant, DomainGeometry};
use pmcf_core::operators::RegParams;
use pmcf_core::oracle::{exact_disk_arrival_time, radial_regularized_solve, RadialProfile};
use pmcf_core::rates::{beta_exponents, optimize_rate};
use pmcf_core::solver::{continuation_solve, IterationMode, MeshPlan, SolveOptions, SolveReport};
use pmcf_core::Error;

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmcfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Mesh = 3,
    OutsideDomain = 4,
    LinearSolve = 5,
    NoConvergence = 6,
    Divergence = 7,
    Infeasible = 8,
    Oracle = 9,
    BufferTooSmall = 10,
    Io = 11,
    Panic = 12,
}

/// Linearization strategy of the nonlinear solver.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmcfMode {
    /// Jacobian at the current iterate, with step halving.
    Newton = 0,
    /// Jacobian at the initial guess of each stage, factored once.
    Frozen = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmcfSolveOptions {
    pub mode: PmcfMode,
    /// Bound on the max-norm of the residual vector.
    pub tol: f64,
    /// Iterations allowed per continuation stage.
    pub max_iter: usize,
    /// Exponent of the `H^{1,mu}` norm used for contraction estimates.
    pub mu: f64,
    pub max_halvings: usize,
}

/// Summary of the last continuation stage.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmcfSolveReport {
    pub epsilon: f64,
    pub h: f64,
    pub k: f64,
    pub iterations: usize,
    pub final_residual: f64,
    /// Largest step contraction estimate; NaN with fewer than two steps.
    pub contraction_max: f64,
    /// Ellipticity bounds of the Hessian of the regularized integrand.
    pub lambda_min: f64,
    pub lambda_max: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmcfRates {
    pub k: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub s: f64,
    pub r: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma_gap: f64,
    pub beta_gap: f64,
    pub r_gap: f64,
    /// The optimum sits at the upper end of the searched gamma range.
    pub at_gamma_max: bool,
}

/// P2 space on a boundary-fitted triangulation.
pub struct PmcfMesh {
    space: Arc<P2Space>,
}

/// Discrete solution together with the report of its last stage.
pub struct PmcfSolution {
    u: FeFunction,
    report: SolveReport,
}

/// Radial profile of the regularized problem on a disk.
pub struct PmcfProfile {
    profile: RadialProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PmcfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn status_of(e: &Error) -> PmcfStatus {
    match e {
        Error::InvalidParameter(_) | Error::NotInVh { .. } => PmcfStatus::InvalidParameter,
        Error::Mesh(_) => PmcfStatus::Mesh,
        Error::PointOutside(..) => PmcfStatus::OutsideDomain,
        Error::LinearSolve { .. } => PmcfStatus::LinearSolve,
        Error::NoConvergence { .. } => PmcfStatus::NoConvergence,
        Error::Divergence { .. } => PmcfStatus::Divergence,
        Error::Stage { source, .. } => status_of(source),
        Error::Infeasible(_) => PmcfStatus::Infeasible,
        Error::Oracle(_) => PmcfStatus::Oracle,
        Error::Parse { .. } | Error::Io(_) | Error::Csv(_) => PmcfStatus::Io,
    }
}

fn null(what: &str) -> Failure {
    Failure(PmcfStatus::NullPointer, format!("{what} is null"))
}

fn set_last_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).expect("interior nul removed"));
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Runs `f`, records its failure (or clears the record) and converts panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PmcfStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure(PmcfStatus::Panic, format!("panic: {msg}")))
    });
    match outcome {
        Ok(()) => {
            set_last_error(None);
            PmcfStatus::Ok
        }
        Err(Failure(status, msg)) => {
            set_last_error(Some(msg));
            status
        }
    }
}

fn writable<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    Ok(())
}

/// Writes `value` to `out` after checking it for null.
unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    writable(out)?;
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn pmcf_status_name(status: PmcfStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PmcfStatus::Ok => c"ok",
        PmcfStatus::NullPointer => c"null pointer",
        PmcfStatus::InvalidParameter => c"invalid parameter",
        PmcfStatus::Mesh => c"mesh generation failed",
        PmcfStatus::OutsideDomain => c"point outside the domain",
        PmcfStatus::LinearSolve => c"linear solve failed",
        PmcfStatus::NoConvergence => c"no convergence",
        PmcfStatus::Divergence => c"divergence",
        PmcfStatus::Infeasible => c"infeasible rate constraints",
        PmcfStatus::Oracle => c"radial oracle failed",
        PmcfStatus::BufferTooSmall => c"buffer too small",
        PmcfStatus::Io => c"input/output error",
        PmcfStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Copies the message of the most recent failure on this thread into `buf`
/// (truncated, always NUL-terminated when `len > 0`) and returns the full
/// message length without the terminator; 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pmcf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

fn new_mesh(domain: pmcf_core::Result<DomainGeometry>, target_h: f64) -> Result<*mut PmcfMesh, Failure> {
    let mesh = build_mesh(&domain?, target_h)?;
    Ok(Box::into_raw(Box::new(PmcfMesh {
        space: P2Space::new(Arc::new(mesh)),
    })))
}

/// Polar mesh of the disk of `radius` centred at the origin.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pmcf_mesh_disk(radius: f64, target_h: f64, out: *mut *mut PmcfMesh) -> PmcfStatus {
    guard(|| {
        writable(out)?;
        put(out, new_mesh(DomainGeometry::disk(radius), target_h)?)
    })
}

/// Mesh of the ellipse with semi-axes `a` (along x) and `b`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pmcf_mesh_ellipse(a: f64, b: f64, target_h: f64, out: *mut *mut PmcfMesh) -> PmcfStatus {
    guard(|| {
        writable(out)?;
        put(out, new_mesh(DomainGeometry::ellipse(a, b), target_h)?)
    })
}

/// # Safety
/// `mesh` must be null or a pointer from a `pmcf_mesh_*` constructor that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn pmcf_mesh_free(mesh: *mut PmcfMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// # Safety
/// `mesh` must be null or a live mesh handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_mesh_vertex_count(mesh: *const PmcfMesh, out: *mut usize) -> PmcfStatus {
    guard(|| put(out, handle(mesh, "mesh")?.space.mesh().vertices().len()))
}

/// # Safety
/// `mesh` must be null or a live mesh handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_mesh_triangle_count(mesh: *const PmcfMesh, out: *mut usize) -> PmcfStatus {
    guard(|| put(out, handle(mesh, "mesh")?.space.mesh().triangles().len()))
}

/// Number of P2 degrees of freedom (vertices plus edge midpoints).
///
/// # Safety
/// `mesh` must be null or a live mesh handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_mesh_dof_count(mesh: *const PmcfMesh, out: *mut usize) -> PmcfStatus {
    guard(|| put(out, handle(mesh, "mesh")?.space.n_dofs()))
}

/// Longest edge.
///
/// # Safety
/// `mesh` must be null or a live mesh handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_mesh_h(mesh: *const PmcfMesh, out: *mut f64) -> PmcfStatus {
    guard(|| put(out, handle(mesh, "mesh")?.space.mesh().h()))
}

/// Largest boundary deviation of the discrete boundary divided by `h^2`.
///
/// # Safety
/// `mesh` must be null or a live mesh handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_mesh_sandwich_constant(mesh: *const PmcfMesh, out: *mut f64) -> PmcfStatus {
    guard(|| put(out, sandwich_constant(handle(mesh, "mesh")?.space.mesh())))
}

/// Defaults: Newton, `tol = 1e-10`, 50 iterations, `mu = 3`, 10 halvings.
#[no_mangle]
pub extern "C" fn pmcf_solve_options_default() -> PmcfSolveOptions {
    let d = SolveOptions::default();
    PmcfSolveOptions {
        mode: PmcfMode::Newton,
        tol: d.tol,
        max_iter: d.max_iter,
        mu: d.mu,
        max_halvings: d.max_halvings,
    }
}

/// Continuation solve on a fixed mesh, starting from zero and passing each
/// stage's solution to the next; the last entry of `schedule` is the target
/// regularization parameter.
///
/// # Safety
/// `mesh` must be null or a live mesh handle, `schedule` must point to
/// `schedule_len` doubles, `options` may be null (defaults) or point to a
/// valid `PmcfSolveOptions` whose `mode` is a listed `PmcfMode` value, and
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_solve(
    mesh: *const PmcfMesh,
    k: f64,
    schedule: *const f64,
    schedule_len: usize,
    options: *const PmcfSolveOptions,
    out: *mut *mut PmcfSolution,
) -> PmcfStatus {
    guard(|| {
        let space = handle(mesh, "mesh")?.space.clone();
        writable(out)?;
        if schedule.is_null() || schedule_len == 0 {
            return Err(Failure(PmcfStatus::InvalidParameter, "schedule is empty".into()));
        }
        let schedule = std::slice::from_raw_parts(schedule, schedule_len);
        let o = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| pmcf_solve_options_default());
        let opts = SolveOptions {
            mode: match o.mode {
                PmcfMode::Newton => IterationMode::Newton,
                PmcfMode::Frozen => IterationMode::Frozen,
            },
            tol: o.tol,
            max_iter: o.max_iter,
            mu: o.mu,
            max_halvings: o.max_halvings,
            frozen_reference: None,
        };
        let res = continuation_solve(&MeshPlan::Fixed(space), k, schedule, &opts, None)?;
        let sol = PmcfSolution {
            u: res.solution().clone(),
            report: res.report().clone(),
        };
        put(out, Box::into_raw(Box::new(sol)))
    })
}

/// # Safety
/// `solution` must be null or a pointer from [`pmcf_solve`] that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn pmcf_solution_free(solution: *mut PmcfSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `solution` must be null or a live solution handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_solution_dof_count(solution: *const PmcfSolution, out: *mut usize) -> PmcfStatus {
    guard(|| put(out, handle(solution, "solution")?.u.coefficients().len()))
}

/// Copies the nodal coefficients (dof order: vertices, then edge midpoints)
/// into `buf`, which must hold at least the dof count.
///
/// # Safety
/// `solution` must be null or a live solution handle; `buf` must be null or
/// point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pmcf_solution_coefficients(
    solution: *const PmcfSolution,
    buf: *mut f64,
    len: usize,
) -> PmcfStatus {
    guard(|| {
        let c = handle(solution, "solution")?.u.coefficients();
        if buf.is_null() {
            return Err(null("buffer"));
        }
        if len < c.len() {
            return Err(Failure(
                PmcfStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", c.len()),
            ));
        }
        ptr::copy_nonoverlapping(c.as_ptr(), buf, c.len());
        Ok(())
    })
}

/// Value of the discrete solution at `(x, y)`.
///
/// # Safety
/// `solution` must be null or a live solution handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_solution_evaluate(
    solution: *const PmcfSolution,
    x: f64,
    y: f64,
    out: *mut f64,
) -> PmcfStatus {
    guard(|| {
        writable(out)?;
        put(out, handle(solution, "solution")?.u.evaluate([x, y])?)
    })
}

/// # Safety
/// `solution` must be null or a live solution handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_solution_report(solution: *const PmcfSolution, out: *mut PmcfSolveReport) -> PmcfStatus {
    guard(|| {
        let r = &handle(solution, "solution")?.report;
        put(
            out,
            PmcfSolveReport {
                epsilon: r.epsilon,
                h: r.h,
                k: r.k,
                iterations: r.iterations,
                final_residual: r.final_residual,
                contraction_max: r.contraction_max().unwrap_or(f64::NAN),
                lambda_min: r.ellipticity.lambda_min,
                lambda_max: r.ellipticity.lambda_max,
            },
        )
    })
}

/// Solves the radial problem on the disk of `radius` to `tol` (at most 1e-8).
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_profile_solve(
    k: f64,
    epsilon: f64,
    radius: f64,
    tol: f64,
    out: *mut *mut PmcfProfile,
) -> PmcfStatus {
    guard(|| {
        writable(out)?;
        let rp = RegParams::new(epsilon, k)?;
        let profile = radial_regularized_solve(&rp, radius, pmcf_core::oracle::MIN_GRID_N, tol)?;
        put(out, Box::into_raw(Box::new(PmcfProfile { profile })))
    })
}

/// # Safety
/// `profile` must be null or a pointer from [`pmcf_profile_solve`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn pmcf_profile_free(profile: *mut PmcfProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Profile value at the distance `r` from the centre, `0 <= r <= radius`.
///
/// # Safety
/// `profile` must be null or a live profile handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_profile_value(profile: *const PmcfProfile, r: f64, out: *mut f64) -> PmcfStatus {
    guard(|| {
        writable(out)?;
        let p = &handle(profile, "profile")?.profile;
        put(out, p.evaluate([r, 0.0])?)
    })
}

/// Richardson estimate of the profile's nodal error.
///
/// # Safety
/// `profile` must be null or a live profile handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_profile_error_estimate(profile: *const PmcfProfile, out: *mut f64) -> PmcfStatus {
    guard(|| put(out, handle(profile, "profile")?.profile.error_estimate()))
}

/// Arrival time of the power mean curvature flow from the circle of
/// `radius`, evaluated at `(x, y)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_exact_disk_arrival_time(
    k: f64,
    radius: f64,
    x: f64,
    y: f64,
    out: *mut f64,
) -> PmcfStatus {
    guard(|| {
        writable(out)?;
        put(out, exact_disk_arrival_time(k, radius, [x, y])?)
    })
}

/// The two exponents whose difference governs the rate constraints.
///
/// # Safety
/// `beta1` and `beta2` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_beta_exponents(
    k: f64,
    alpha: f64,
    gamma: f64,
    s: f64,
    beta1: *mut f64,
    beta2: *mut f64,
) -> PmcfStatus {
    guard(|| {
        writable(beta1)?;
        writable(beta2)?;
        let (b1, b2) = beta_exponents(k, alpha, gamma, s)?;
        put(beta1, b1)?;
        put(beta2, b2)
    })
}

/// Rate exponents maximizing `min(r, s)` over `gamma` in `(1 + k, gamma_max]`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pmcf_rates_optimize(k: f64, gamma_max: f64, margin: f64, out: *mut PmcfRates) -> PmcfStatus {
    guard(|| {
        writable(out)?;
        let re = optimize_rate(k, gamma_max, margin)?;
        put(
            out,
            PmcfRates {
                k: re.k,
                alpha: re.alpha,
                gamma: re.gamma,
                s: re.s,
                r: re.r,
                beta1: re.beta1,
                beta2: re.beta2,
                gamma_gap: re.margins.gamma_gap,
                beta_gap: re.margins.beta_gap,
                r_gap: re.margins.r_gap,
                at_gamma_max: re.at_gamma_max,
            },
        )
    })
}
