use std::sync::Arc;

use super::space::{basis, basis_gradients, P2Space};
use crate::error::{invalid, Error, Result};
use crate::Point;

/// A function with a pointwise value and gradient, used as the reference
/// side of error norms.
pub trait ScalarField: Sync {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
}

/// Closure-backed [`ScalarField`].
pub struct Analytic<F, G> {
    value: F,
    gradient: G,
}

impl<F, G> Analytic<F, G>
where
    F: Fn(Point) -> f64 + Sync,
    G: Fn(Point) -> [f64; 2] + Sync,
{
    pub fn new(value: F, gradient: G) -> Self {
        Self { value, gradient }
    }
}

impl<F, G> ScalarField for Analytic<F, G>
where
    F: Fn(Point) -> f64 + Sync,
    G: Fn(Point) -> [f64; 2] + Sync,
{
    fn value(&self, p: Point) -> f64 {
        (self.value)(p)
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        (self.gradient)(p)
    }
}

/// Coefficient vector over the dofs of a [`P2Space`].
#[derive(Debug, Clone)]
pub struct FeFunction {
    space: Arc<P2Space>,
    coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn zeros(space: &Arc<P2Space>) -> Self {
        Self {
            space: Arc::clone(space),
            coeffs: vec![0.0; space.n_dofs()],
        }
    }

    pub fn from_coefficients(space: &Arc<P2Space>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_dofs() {
            return Err(invalid(format!(
                "{} coefficients for a space with {} dofs",
                coeffs.len(),
                space.n_dofs()
            )));
        }
        Ok(Self {
            space: Arc::clone(space),
            coeffs,
        })
    }

    /// Builds a member of `V_h` from its interior values.
    pub fn from_interior(space: &Arc<P2Space>, values: &[f64]) -> Result<Self> {
        if values.len() != space.n_interior() {
            return Err(invalid(format!(
                "{} interior values for {} interior dofs",
                values.len(),
                space.n_interior()
            )));
        }
        let mut f = Self::zeros(space);
        for (&d, &v) in space.interior_dofs().iter().zip(values) {
            f.coeffs[d] = v;
        }
        Ok(f)
    }

    pub fn space(&self) -> &Arc<P2Space> {
        &self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn interior_values(&self) -> Vec<f64> {
        self.space.interior_dofs().iter().map(|&d| self.coeffs[d]).collect()
    }

    /// Whether every boundary coefficient is exactly zero.
    pub fn is_in_vh(&self) -> bool {
        self.space.boundary_dofs().all(|d| self.coeffs[d] == 0.0)
    }

    pub fn ensure_in_vh(&self) -> Result<()> {
        match self.space.boundary_dofs().find(|&d| self.coeffs[d] != 0.0) {
            Some(dof) => Err(Error::NotInVh {
                dof,
                value: self.coeffs[dof],
            }),
            None => Ok(()),
        }
    }

    pub fn value_in(&self, t: usize, l: [f64; 3]) -> f64 {
        let dofs = self.space.triangle_dofs(t);
        basis(l).iter().zip(dofs).map(|(b, &d)| b * self.coeffs[d]).sum()
    }

    pub fn gradient_in(&self, t: usize, l: [f64; 3]) -> [f64; 2] {
        let dofs = self.space.triangle_dofs(t);
        let g = basis_gradients(l, &self.space.geometry(t).grad_lambda);
        let mut out = [0.0; 2];
        for (gi, &d) in g.iter().zip(dofs) {
            out[0] += gi[0] * self.coeffs[d];
            out[1] += gi[1] * self.coeffs[d];
        }
        out
    }

    pub fn evaluate(&self, p: Point) -> Result<f64> {
        let (t, l) = self.space.locate(p)?;
        Ok(self.value_in(t, l))
    }

    pub fn evaluate_gradient(&self, p: Point) -> Result<[f64; 2]> {
        let (t, l) = self.space.locate(p)?;
        Ok(self.gradient_in(t, l))
    }

    /// `self + alpha * other` on the same space.
    pub fn axpy(&self, alpha: f64, other: &FeFunction) -> FeFunction {
        debug_assert!(Arc::ptr_eq(&self.space, &other.space));
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + alpha * b)
            .collect();
        FeFunction {
            space: Arc::clone(&self.space),
            coeffs,
        }
    }

    pub fn scaled(&self, alpha: f64) -> FeFunction {
        FeFunction {
            space: Arc::clone(&self.space),
            coeffs: self.coeffs.iter().map(|c| alpha * c).collect(),
        }
    }

    /// Transfers this function to another space by nodal evaluation; dofs
    /// outside this mesh are extrapolated from the nearest triangle.
    pub fn transfer_to(&self, target: &Arc<P2Space>) -> FeFunction {
        let coeffs = target
            .dof_coordinates()
            .iter()
            .map(|&p| {
                let (t, l) = self.space.locate_nearest(p);
                self.value_in(t, l)
            })
            .collect();
        FeFunction {
            space: Arc::clone(target),
            coeffs,
        }
    }
}

/// The nodal interpolant `I_h g`.
pub fn interpolate<F: Fn(Point) -> f64>(space: &Arc<P2Space>, g: F) -> FeFunction {
    let coeffs = space.dof_coordinates().iter().map(|&p| g(p)).collect();
    FeFunction {
        space: Arc::clone(space),
        coeffs,
    }
}

/// `z_h`: the boundary-node part of `f`, zero at interior nodes.
pub fn boundary_part(f: &FeFunction) -> FeFunction {
    let mut z = FeFunction::zeros(f.space());
    for d in f.space().boundary_dofs() {
        z.coeffs[d] = f.coeffs[d];
    }
    z
}

/// `f - z_h`: zeroes the boundary coefficients, leaving interior ones.
pub fn boundary_correct(f: &FeFunction) -> FeFunction {
    let mut out = f.clone();
    for d in f.space().boundary_dofs() {
        out.coeffs[d] = 0.0;
    }
    out
}
