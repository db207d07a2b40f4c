//! Continuous piecewise-quadratic (P2) Lagrange elements.

mod function;
mod io;
mod norms;
pub mod quadrature;
mod space;

pub use function::{boundary_correct, boundary_part, interpolate, Analytic, FeFunction, ScalarField};
pub use io::{read_function, write_function, FUNCTION_HEADER};
pub use norms::{
    error_c0, error_c0_nodal, error_h1mu, error_holder_seminorm, error_lq, error_w1inf, gradient_lq, holder_seminorm,
    holder_seminorm_on, norm_c0, norm_h1mu, norm_lq, sample_points, SamplePoint, SampleSet, DEFAULT_MU,
    MAX_HOLDER_PAIRS,
};
pub use space::{basis, basis_gradients, P2Space, TriangleGeometry};
