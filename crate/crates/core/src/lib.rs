//! Finite-element laboratory for the regularized level-set formulation of
//! power mean curvature flow in two dimensions.
//!
//! The crate computes the solution `u_eps` of
//!
//! ```text
//! div(Du / sqrt(eps^2 + |Du|^2)) = -(eps^2 + |Du|^2)^(-1/(2k))   in Omega
//!                              u = 0                             on dOmega
//! ```
//!
//! with continuous piecewise-quadratic elements, evaluates the explicit rate
//! exponents that govern `|u - u_eps|` and `|u - u_eps_h|`, and checks the
//! discrete solutions against a radially reduced 1D oracle on the disk.
//!
//! Module map:
//!
//! * [`geometry`]: smooth domains, boundary-fitted polar meshes, the ASCII mesh format.
//! * [`fe`]: the P2 space, interpolation, boundary correction and norms.
//! * [`operators`]: the regularized nonlinearity, residual and Jacobian assembly.
//! * [`solver`]: Newton / frozen fixed-point iteration, continuation, contraction probes.
//! * [`rates`]: the convergence-rate exponent algebra.
//! * [`oracle`]: closed-form disk arrival time and the radial 1D solver.
//! * [`experiments`]: EOC tables and convergence studies.

// `!(x > 0.0)` is used on purpose so that NaN is rejected as well.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod fe;
pub mod geometry;
pub mod linalg;
pub mod operators;
pub mod oracle;
pub mod rates;
pub mod solver;

pub use error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];
