//! Weak-form residual and linearization over the interior dofs of `V_h`.
//!
//! For `w` in `V_h` and each interior basis function `phi_i`:
//!
//! ```text
//! R_i(w)  = int <Dw, Dphi_i> / |Dw|_eps  -  int |Dw|_eps^(-1/k) phi_i
//! A_ij(w) = int <D^2 f_eps(Dw) Dphi_j, Dphi_i>
//!         + (1/k) int |Dw|_eps^(-1-1/k) <D f_eps(Dw), Dphi_j> phi_i
//! ```
//!
//! `A` is the exact Jacobian of `R`. The second (convection) term makes it
//! nonsymmetric. Element contributions are computed in parallel and summed
//! in fixed element order.

use rayon::prelude::*;

use super::regularization::{f_eps, f_eps_grad, f_eps_hess, hessian_eigen_bounds, RegParams};
use crate::error::Result;
use crate::fe::quadrature::TRI7;
use crate::fe::{basis, basis_gradients, FeFunction, P2Space};
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::Point;

type LocalMatrix = [[f64; 6]; 6];

struct QpData {
    weight: f64,
    phi: [f64; 6],
    dphi: [[f64; 2]; 6],
}

fn qp_data(space: &P2Space, t: usize) -> [QpData; 7] {
    let g = space.geometry(t);
    TRI7.map(|q| QpData {
        weight: q.weight * g.area,
        phi: basis(q.bary),
        dphi: basis_gradients(q.bary, &g.grad_lambda),
    })
}

fn local_coeffs(w: &FeFunction, t: usize) -> [f64; 6] {
    let dofs = w.space().triangle_dofs(t);
    dofs.map(|d| w.coefficients()[d])
}

fn gradient(c: &[f64; 6], dphi: &[[f64; 2]; 6]) -> [f64; 2] {
    let mut g = [0.0; 2];
    for a in 0..6 {
        g[0] += c[a] * dphi[a][0];
        g[1] += c[a] * dphi[a][1];
    }
    g
}

fn local_residual(w: &FeFunction, t: usize, rp: &RegParams) -> [f64; 6] {
    let c = local_coeffs(w, t);
    let inv_k = 1.0 / rp.k();
    let mut r = [0.0; 6];
    for q in qp_data(w.space(), t) {
        let dw = gradient(&c, &q.dphi);
        let flux = f_eps_grad(dw, rp);
        let source = f_eps(dw, rp).powf(-inv_k);
        for a in 0..6 {
            r[a] += q.weight * (flux[0] * q.dphi[a][0] + flux[1] * q.dphi[a][1] - source * q.phi[a]);
        }
    }
    r
}

fn local_system(w: &FeFunction, t: usize, rp: &RegParams) -> (LocalMatrix, [f64; 6]) {
    let c = local_coeffs(w, t);
    let inv_k = 1.0 / rp.k();
    let mut m = [[0.0; 6]; 6];
    let mut r = [0.0; 6];
    for q in qp_data(w.space(), t) {
        let dw = gradient(&c, &q.dphi);
        let f = f_eps(dw, rp);
        let flux = f_eps_grad(dw, rp);
        let hess = f_eps_hess(dw, rp);
        let source = f.powf(-inv_k);
        let conv = inv_k * f.powf(-1.0 - inv_k);
        // H * Dphi_b and the convection coefficient <c, Dphi_b>
        let mut hd = [[0.0; 2]; 6];
        let mut cd = [0.0; 6];
        for b in 0..6 {
            let d = q.dphi[b];
            hd[b] = [
                hess[0][0] * d[0] + hess[0][1] * d[1],
                hess[1][0] * d[0] + hess[1][1] * d[1],
            ];
            cd[b] = conv * (flux[0] * d[0] + flux[1] * d[1]);
        }
        for a in 0..6 {
            let da = q.dphi[a];
            r[a] += q.weight * (flux[0] * da[0] + flux[1] * da[1] - source * q.phi[a]);
            for b in 0..6 {
                m[a][b] += q.weight * (hd[b][0] * da[0] + hd[b][1] * da[1] + cd[b] * q.phi[a]);
            }
        }
    }
    (m, r)
}

fn scatter_vector(space: &P2Space, locals: &[[f64; 6]]) -> Vec<f64> {
    let mut out = vec![0.0; space.n_interior()];
    for (t, local) in locals.iter().enumerate() {
        for (a, &d) in space.triangle_dofs(t).iter().enumerate() {
            if let Some(i) = space.interior_index(d) {
                out[i] += local[a];
            }
        }
    }
    out
}

fn scatter_matrix(space: &P2Space, locals: &[LocalMatrix]) -> CsrMatrix {
    let mut b = TripletBuilder::with_capacity(space.n_interior(), 36 * locals.len());
    for (t, local) in locals.iter().enumerate() {
        let dofs = space.triangle_dofs(t);
        for a in 0..6 {
            let Some(i) = space.interior_index(dofs[a]) else {
                continue;
            };
            for bb in 0..6 {
                if let Some(j) = space.interior_index(dofs[bb]) {
                    b.push(i, j, local[a][bb]);
                }
            }
        }
    }
    b.build()
}

/// Residual vector over the interior dofs; `w` must lie in `V_h`.
pub fn assemble_residual(w: &FeFunction, rp: &RegParams) -> Result<Vec<f64>> {
    w.ensure_in_vh()?;
    let locals: Vec<[f64; 6]> = (0..w.space().n_triangles())
        .into_par_iter()
        .map(|t| local_residual(w, t, rp))
        .collect();
    Ok(scatter_vector(w.space(), &locals))
}

/// Jacobian of [`assemble_residual`] at `w_ref`.
pub fn assemble_linearized(w_ref: &FeFunction, rp: &RegParams) -> Result<CsrMatrix> {
    Ok(assemble_system(w_ref, rp)?.0)
}

/// Jacobian and residual at `w` in one pass.
pub fn assemble_system(w: &FeFunction, rp: &RegParams) -> Result<(CsrMatrix, Vec<f64>)> {
    w.ensure_in_vh()?;
    let space = w.space();
    let locals: Vec<(LocalMatrix, [f64; 6])> = (0..space.n_triangles())
        .into_par_iter()
        .map(|t| local_system(w, t, rp))
        .collect();
    let mats: Vec<LocalMatrix> = locals.iter().map(|l| l.0).collect();
    let vecs: Vec<[f64; 6]> = locals.iter().map(|l| l.1).collect();
    Ok((scatter_matrix(space, &mats), scatter_vector(space, &vecs)))
}

/// Load vector `int s phi_i` over interior dofs.
pub fn assemble_load<S: Fn(Point) -> f64 + Sync>(space: &P2Space, source: S) -> Vec<f64> {
    let locals: Vec<[f64; 6]> = (0..space.n_triangles())
        .into_par_iter()
        .map(|t| {
            let mut r = [0.0; 6];
            for (q, d) in TRI7.iter().zip(qp_data(space, t)) {
                let s = source(space.point_at(t, q.bary));
                for a in 0..6 {
                    r[a] += d.weight * s * d.phi[a];
                }
            }
            r
        })
        .collect();
    scatter_vector(space, &locals)
}

/// Stiffness matrix of the Laplacian, `int <Dphi_j, Dphi_i>`.
pub fn assemble_stiffness(space: &P2Space) -> CsrMatrix {
    let locals: Vec<LocalMatrix> = (0..space.n_triangles())
        .into_par_iter()
        .map(|t| {
            let mut m = [[0.0; 6]; 6];
            for d in qp_data(space, t) {
                for a in 0..6 {
                    for b in 0..6 {
                        m[a][b] += d.weight * (d.dphi[a][0] * d.dphi[b][0] + d.dphi[a][1] * d.dphi[b][1]);
                    }
                }
            }
            m
        })
        .collect();
    scatter_matrix(space, &locals)
}

/// Ellipticity diagnostics of the linearized operator at a given state,
/// sampled at all quadrature points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticityReport {
    /// Smallest eigenvalue of `D^2 f_eps(Dw)` over the mesh.
    pub lambda_min: f64,
    /// Largest eigenvalue over the mesh.
    pub lambda_max: f64,
    pub ratio: f64,
    /// `max |c| / lambda_min`, with `c = (1/k) |Dw|_eps^(-1-1/k) D f_eps(Dw)`.
    pub nu: f64,
    /// Estimate of `sup |D a_ij| + sup |D c_i|` from difference quotients
    /// between quadrature points of each triangle.
    pub a1_estimate: f64,
}

pub fn ellipticity_report(w: &FeFunction, rp: &RegParams) -> EllipticityReport {
    let space = w.space();
    let inv_k = 1.0 / rp.k();
    let per_triangle: Vec<(f64, f64, f64, f64)> = (0..space.n_triangles())
        .into_par_iter()
        .map(|t| {
            let c = local_coeffs(w, t);
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            let mut cmax: f64 = 0.0;
            let mut samples = Vec::with_capacity(7);
            for (q, d) in TRI7.iter().zip(qp_data(space, t)) {
                let dw = gradient(&c, &d.dphi);
                let (l, u) = hessian_eigen_bounds(dw, rp);
                lo = lo.min(l);
                hi = hi.max(u);
                let g = f_eps_grad(dw, rp);
                let s = inv_k * f_eps(dw, rp).powf(-1.0 - inv_k);
                let conv = [s * g[0], s * g[1]];
                cmax = cmax.max(conv[0].hypot(conv[1]));
                samples.push((space.point_at(t, q.bary), f_eps_hess(dw, rp), conv));
            }
            let mut da: f64 = 0.0;
            let mut dc: f64 = 0.0;
            let (x0, a0, c0) = samples[0];
            for &(x, a, cv) in &samples[1..] {
                let dist = (x[0] - x0[0]).hypot(x[1] - x0[1]);
                let fa =
                    ((a[0][0] - a0[0][0]).powi(2) + 2.0 * (a[0][1] - a0[0][1]).powi(2) + (a[1][1] - a0[1][1]).powi(2))
                        .sqrt();
                da = da.max(fa / dist);
                dc = dc.max((cv[0] - c0[0]).hypot(cv[1] - c0[1]) / dist);
            }
            (lo, hi, cmax, da + dc)
        })
        .collect();
    let lambda_min = per_triangle.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let lambda_max = per_triangle.iter().map(|p| p.1).fold(0.0, f64::max);
    let cmax = per_triangle.iter().map(|p| p.2).fold(0.0, f64::max);
    let a1 = per_triangle.iter().map(|p| p.3).fold(0.0, f64::max);
    EllipticityReport {
        lambda_min,
        lambda_max,
        ratio: lambda_max / lambda_min,
        nu: cmax / lambda_min,
        a1_estimate: a1,
    }
}
