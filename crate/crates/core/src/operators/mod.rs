//! The regularized nonlinearity and the discrete operators built from it.

mod assembly;
mod regularization;

pub use assembly::{
    assemble_linearized, assemble_load, assemble_residual, assemble_stiffness, assemble_system, ellipticity_report,
    EllipticityReport,
};
pub use regularization::{f_eps, f_eps_grad, f_eps_hess, hessian_eigen_bounds, RegParams};
