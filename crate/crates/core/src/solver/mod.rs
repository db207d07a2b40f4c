//! Discrete solution of the regularized problem.
//!
//! The map `T w = w - L(w_ref)^{-1} R(w)` is iterated either with the
//! reference updated every step (Newton) or held fixed (frozen). Small
//! `eps` is reached by continuation, optionally on meshes refined along
//! `h = c eps^beta`.

mod continuation;
mod coupling;
mod iterate;
mod probe;
mod report;

pub use continuation::halving_schedule;
pub use continuation::{continuation_solve, ContinuationResult, MeshPlan};
pub use coupling::{coupled_mesh_size, CouplingParams};
pub use iterate::{apply_t, solve_regularized, IterationMode, SolveOptions};
pub use probe::{contraction_probe, smooth_perturbation, ProbeResult};
pub use report::{SolveReport, REPORT_COLUMNS};
