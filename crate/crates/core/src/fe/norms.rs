//! Norms and error norms of P2 functions.
//!
//! Integral norms use the 7-point rule on every triangle. Sup-type norms
//! and the Holder seminorm are sampling estimates over a fixed, documented
//! point set so that results are reproducible bit for bit.

use rayon::prelude::*;

use super::function::{FeFunction, ScalarField};
use super::quadrature::TRI7;
use super::space::P2Space;
use crate::error::{invalid, Result};
use crate::Point;

/// Default Sobolev exponent for `H^{1,mu}`; the admissible range is `(2, 4)`.
pub const DEFAULT_MU: f64 = 3.0;

/// Upper bound on the number of point pairs visited by the Holder estimate.
pub const MAX_HOLDER_PAIRS: usize = 1_000_000;

/// Six interior sample points per triangle, added to the node set.
const INTERIOR_SAMPLES: [[f64; 3]; 6] = [
    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    [1.0 / 6.0, 5.0 / 12.0, 5.0 / 12.0],
    [5.0 / 12.0, 1.0 / 6.0, 5.0 / 12.0],
    [5.0 / 12.0, 5.0 / 12.0, 1.0 / 6.0],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSet {
    /// Every node (vertex or edge midpoint) exactly once.
    Dofs,
    /// Nodes plus six interior points per triangle.
    Standard,
    /// All points of the barycentric lattice of the given level in every
    /// triangle (shared points repeat). Used for gradient sup norms.
    Lattice(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct SamplePoint {
    pub triangle: usize,
    pub bary: [f64; 3],
    pub x: Point,
}

/// Barycentric coordinates of the six local nodes.
const LOCAL_NODES: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5],
    [0.5, 0.5, 0.0],
];

pub fn sample_points(space: &P2Space, set: SampleSet) -> Vec<SamplePoint> {
    let mut out = Vec::new();
    match set {
        SampleSet::Dofs | SampleSet::Standard => {
            let mut seen = vec![false; space.n_dofs()];
            for t in 0..space.n_triangles() {
                for (local, &d) in space.triangle_dofs(t).iter().enumerate() {
                    if !seen[d] {
                        seen[d] = true;
                        out.push(SamplePoint {
                            triangle: t,
                            bary: LOCAL_NODES[local],
                            x: space.dof_coordinates()[d],
                        });
                    }
                }
            }
            if set == SampleSet::Standard {
                for t in 0..space.n_triangles() {
                    for &l in &INTERIOR_SAMPLES {
                        out.push(SamplePoint {
                            triangle: t,
                            bary: l,
                            x: space.point_at(t, l),
                        });
                    }
                }
            }
        }
        SampleSet::Lattice(level) => {
            let n = level.max(1);
            for t in 0..space.n_triangles() {
                for i in 0..=n {
                    for j in 0..=(n - i) {
                        let l = [(n - i - j) as f64 / n as f64, i as f64 / n as f64, j as f64 / n as f64];
                        out.push(SamplePoint {
                            triangle: t,
                            bary: l,
                            x: space.point_at(t, l),
                        });
                    }
                }
            }
        }
    }
    out
}

fn diff_value(f: &FeFunction, reference: Option<&dyn ScalarField>, s: &SamplePoint) -> f64 {
    let v = f.value_in(s.triangle, s.bary);
    match reference {
        Some(g) => v - g.value(s.x),
        None => v,
    }
}

fn diff_gradient(f: &FeFunction, reference: Option<&dyn ScalarField>, s: &SamplePoint) -> [f64; 2] {
    let v = f.gradient_in(s.triangle, s.bary);
    match reference {
        Some(g) => {
            let r = g.gradient(s.x);
            [v[0] - r[0], v[1] - r[1]]
        }
        None => v,
    }
}

/// Sum over triangles of `area * sum_q w_q * integrand(value, gradient)`.
fn integrate<I>(f: &FeFunction, reference: Option<&dyn ScalarField>, integrand: I) -> f64
where
    I: Fn(f64, [f64; 2]) -> f64 + Sync,
{
    let space = f.space();
    let per_triangle: Vec<f64> = (0..space.n_triangles())
        .into_par_iter()
        .map(|t| {
            let area = space.geometry(t).area;
            let mut acc = 0.0;
            for q in &TRI7 {
                let s = SamplePoint {
                    triangle: t,
                    bary: q.bary,
                    x: space.point_at(t, q.bary),
                };
                acc += q.weight * integrand(diff_value(f, reference, &s), diff_gradient(f, reference, &s));
            }
            area * acc
        })
        .collect();
    per_triangle.iter().sum()
}

fn check_exponent(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid(format!("integrability exponent must lie in [1, inf), got {q}")));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(invalid(format!("Holder exponent must lie in (0, 1), got {theta}")));
    }
    Ok(())
}

fn lq(f: &FeFunction, reference: Option<&dyn ScalarField>, q: f64) -> Result<f64> {
    check_exponent(q)?;
    Ok(integrate(f, reference, |v, _| v.abs().powf(q)).powf(1.0 / q))
}

fn h1mu(f: &FeFunction, reference: Option<&dyn ScalarField>, mu: f64) -> Result<f64> {
    check_exponent(mu)?;
    let s = integrate(f, reference, |v, g| v.abs().powf(mu) + g[0].hypot(g[1]).powf(mu));
    Ok(s.powf(1.0 / mu))
}

fn c0(f: &FeFunction, reference: Option<&dyn ScalarField>, set: SampleSet) -> f64 {
    sample_points(f.space(), set)
        .iter()
        .map(|s| diff_value(f, reference, s).abs())
        .fold(0.0, f64::max)
}

pub fn norm_lq(f: &FeFunction, q: f64) -> Result<f64> {
    lq(f, None, q)
}

/// `L^q` norm of `|grad f|`.
pub fn gradient_lq(f: &FeFunction, q: f64) -> Result<f64> {
    check_exponent(q)?;
    Ok(integrate(f, None, |_, g| g[0].hypot(g[1]).powf(q)).powf(1.0 / q))
}

/// `(int |f|^mu + int |grad f|^mu)^(1/mu)`.
pub fn norm_h1mu(f: &FeFunction, mu: f64) -> Result<f64> {
    h1mu(f, None, mu)
}

pub fn norm_c0(f: &FeFunction) -> f64 {
    c0(f, None, SampleSet::Standard)
}

pub fn error_lq(f: &FeFunction, reference: &dyn ScalarField, q: f64) -> Result<f64> {
    lq(f, Some(reference), q)
}

pub fn error_h1mu(f: &FeFunction, reference: &dyn ScalarField, mu: f64) -> Result<f64> {
    h1mu(f, Some(reference), mu)
}

pub fn error_c0(f: &FeFunction, reference: &dyn ScalarField) -> f64 {
    c0(f, Some(reference), SampleSet::Standard)
}

/// Max error over the node set only.
pub fn error_c0_nodal(f: &FeFunction, reference: &dyn ScalarField) -> f64 {
    f.space()
        .dof_coordinates()
        .iter()
        .zip(f.coefficients())
        .map(|(&p, &c)| (c - reference.value(p)).abs())
        .fold(0.0, f64::max)
}

/// `max(|f - g|, |grad (f - g)|)` sampled on a barycentric lattice in
/// every triangle (gradients taken from inside each triangle).
pub fn error_w1inf(f: &FeFunction, reference: &dyn ScalarField, level: usize) -> f64 {
    let pts = sample_points(f.space(), SampleSet::Lattice(level));
    pts.iter()
        .map(|s| {
            let v = diff_value(f, Some(reference), s).abs();
            let g = diff_gradient(f, Some(reference), s);
            v.max(g[0].hypot(g[1]))
        })
        .fold(0.0, f64::max)
}

/// Holder seminorm estimate `max |f(x) - f(y)| / |x - y|^theta` over pairs
/// of the standard sample set: all pairs within edge-adjacent triangles,
/// plus a deterministic stride through all pairs when there are more than
/// [`MAX_HOLDER_PAIRS`].
pub fn holder_seminorm(f: &FeFunction, theta: f64) -> Result<f64> {
    holder_of(f, None, theta, SampleSet::Standard)
}

pub fn error_holder_seminorm(f: &FeFunction, reference: &dyn ScalarField, theta: f64) -> Result<f64> {
    holder_of(f, Some(reference), theta, SampleSet::Standard)
}

fn holder_of(f: &FeFunction, reference: Option<&dyn ScalarField>, theta: f64, set: SampleSet) -> Result<f64> {
    check_theta(theta)?;
    let pts = sample_points(f.space(), set);
    let xs: Vec<Point> = pts.iter().map(|s| s.x).collect();
    let vs: Vec<f64> = pts.iter().map(|s| diff_value(f, reference, s)).collect();
    let global = holder_seminorm_on(&xs, &vs, theta, MAX_HOLDER_PAIRS)?;
    if set == SampleSet::Standard {
        Ok(global.max(local_holder(f, reference, theta)))
    } else {
        Ok(global)
    }
}

/// Holder quotient over every pair of standard sample points lying in one
/// triangle or in two triangles sharing an edge. Striding thins out
/// short-range pairs on fine meshes; these are where the quotient of a
/// discretization error usually peaks.
fn local_holder(f: &FeFunction, reference: Option<&dyn ScalarField>, theta: f64) -> f64 {
    let space = f.space();
    let mesh = space.mesh();
    let local: Vec<[(Point, f64); 12]> = (0..space.n_triangles())
        .into_par_iter()
        .map(|t| {
            std::array::from_fn(|i| {
                let bary = if i < 6 { LOCAL_NODES[i] } else { INTERIOR_SAMPLES[i - 6] };
                let s = SamplePoint {
                    triangle: t,
                    bary,
                    x: space.point_at(t, bary),
                };
                (s.x, diff_value(f, reference, &s))
            })
        })
        .collect();
    let quotient = |a: &[(Point, f64); 12], b: &[(Point, f64); 12]| {
        let mut best: f64 = 0.0;
        for (x, u) in a {
            for (y, v) in b {
                let d = (x[0] - y[0]).hypot(x[1] - y[1]);
                if d > 0.0 {
                    best = best.max((u - v).abs() / d.powf(theta));
                }
            }
        }
        best
    };
    (0..space.n_triangles())
        .into_par_iter()
        .map(|t| {
            let mut best = quotient(&local[t], &local[t]);
            for &e in &mesh.triangle_edges()[t] {
                for n in mesh.edge_triangles(e) {
                    if n > t {
                        best = best.max(quotient(&local[t], &local[n]));
                    }
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Holder quotient maximum over point pairs. When there are more than
/// `max_pairs` pairs, every `stride`-th pair in row-major order is visited.
pub fn holder_seminorm_on(points: &[Point], values: &[f64], theta: f64, max_pairs: usize) -> Result<f64> {
    check_theta(theta)?;
    if points.len() != values.len() {
        return Err(invalid("points and values differ in length"));
    }
    let n = points.len();
    let total = n * n.saturating_sub(1) / 2;
    if total == 0 {
        return Ok(0.0);
    }
    let stride = total.div_ceil(max_pairs.max(1));
    // Row i covers global pair positions [start_i, start_i + n - 1 - i).
    let rows: Vec<(usize, usize)> = {
        let mut start = 0;
        (0..n)
            .map(|i| {
                let r = (i, start);
                start += n - 1 - i;
                r
            })
            .collect()
    };
    let best = rows
        .par_iter()
        .map(|&(i, start)| {
            let len = n - 1 - i;
            let first = (stride - start % stride) % stride;
            let mut best: f64 = 0.0;
            let mut k = first;
            while k < len {
                let j = i + 1 + k;
                let d = (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]);
                if d > 0.0 {
                    best = best.max((values[i] - values[j]).abs() / d.powf(theta));
                }
                k += stride;
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fe::function::{boundary_part, interpolate, Analytic};
    use crate::geometry::{build_mesh, DomainGeometry};
    use std::sync::Arc;

    fn space(h: f64) -> Arc<P2Space> {
        let mesh = build_mesh(&DomainGeometry::disk(1.0).unwrap(), h).unwrap();
        P2Space::new(Arc::new(mesh))
    }

    #[test]
    fn zero_and_constant() {
        let s = space(0.3);
        let z = FeFunction::zeros(&s);
        assert_eq!(norm_c0(&z), 0.0);
        assert_eq!(norm_lq(&z, 2.0).unwrap(), 0.0);
        assert_eq!(norm_h1mu(&z, 3.0).unwrap(), 0.0);
        assert_eq!(holder_seminorm(&z, 0.5).unwrap(), 0.0);
        let c = interpolate(&s, |_| -2.5);
        assert!((norm_c0(&c) - 2.5).abs() < 1e-14);
        assert!(holder_seminorm(&c, 0.5).unwrap() < 1e-12);
        let area = s.mesh().area();
        assert!((norm_lq(&c, 2.0).unwrap() - 2.5 * area.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn invalid_exponents() {
        let s = space(0.4);
        let z = FeFunction::zeros(&s);
        assert!(norm_lq(&z, 0.5).is_err());
        assert!(norm_h1mu(&z, f64::INFINITY).is_err());
        assert!(holder_seminorm(&z, 0.0).is_err());
        assert!(holder_seminorm(&z, 1.0).is_err());
    }

    #[test]
    fn h1_squared_splits() {
        let s = space(0.25);
        let f = interpolate(&s, |p| (p[0] * 3.0).sin() * (1.0 - p[1] * p[1]));
        let h = norm_h1mu(&f, 2.0).unwrap();
        let l = norm_lq(&f, 2.0).unwrap();
        let g = gradient_lq(&f, 2.0).unwrap();
        assert!((h * h - (l * l + g * g)).abs() <= 1e-12 * h * h);
    }

    #[test]
    fn holder_of_linear_function() {
        // |x1 - y1| / |x - y|^(1/2) <= |x - y|^(1/2) <= sqrt 2 on the unit disk
        let s = space(0.4);
        let f = interpolate(&s, |p| p[0]);
        let pts = sample_points(&s, SampleSet::Standard);
        // exhaustive oracle over all pairs
        let mut brute: f64 = 0.0;
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                let (x, y) = (pts[a].x, pts[b].x);
                let d = (x[0] - y[0]).hypot(x[1] - y[1]);
                brute = brute.max((x[0] - y[0]).abs() / d.sqrt());
            }
        }
        let est = holder_seminorm(&f, 0.5).unwrap();
        assert!((est - brute).abs() < 1e-14);
        assert!(est <= 2f64.sqrt() + 1e-6 && est >= 1.0, "{est}");
    }

    #[test]
    fn holder_monotone_in_sample_density() {
        let s = space(0.3);
        let f = interpolate(&s, |p| (2.0 * p[0]).sin() + p[1] * p[1]);
        for theta in [0.1, 0.5, 0.9] {
            let coarse = holder_of(&f, None, theta, SampleSet::Dofs).unwrap();
            let fine = holder_of(&f, None, theta, SampleSet::Standard).unwrap();
            assert!(fine >= coarse);
        }
    }

    #[test]
    fn strided_pairs_are_deterministic_and_bounded() {
        let pts: Vec<Point> = (0..500).map(|i| [i as f64 * 0.01, (i as f64 * 0.37).sin()]).collect();
        let vals: Vec<f64> = pts.iter().map(|p| p[0] * p[1]).collect();
        let full = holder_seminorm_on(&pts, &vals, 0.5, usize::MAX).unwrap();
        let a = holder_seminorm_on(&pts, &vals, 0.5, 10_000).unwrap();
        let b = holder_seminorm_on(&pts, &vals, 0.5, 10_000).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(a <= full);
    }

    fn cubic() -> Analytic<impl Fn(Point) -> f64 + Sync, impl Fn(Point) -> [f64; 2] + Sync> {
        Analytic::new(|p: Point| p[0].powi(3), |p: Point| [3.0 * p[0] * p[0], 0.0])
    }

    #[test]
    fn interpolation_error_is_second_order_in_w1inf() {
        let hs = [0.2, 0.1];
        let errs: Vec<(f64, f64)> = hs
            .iter()
            .map(|&h| {
                let s = space(h);
                let f = interpolate(&s, |p| p[0].powi(3));
                (s.mesh().h(), error_w1inf(&f, &cubic(), 8))
            })
            .collect();
        let eoc = (errs[0].1 / errs[1].1).ln() / (errs[0].0 / errs[1].0).ln();
        assert!(eoc >= 1.9, "{eoc}");
    }

    #[test]
    fn quadratic_interpolation_error_vanishes() {
        let s = space(0.3);
        let f = interpolate(&s, |p| p[0] * p[1] - p[0]);
        let g = Analytic::new(|p: Point| p[0] * p[1] - p[0], |p: Point| [p[1] - 1.0, p[0]]);
        assert!(error_w1inf(&f, &g, 6) < 1e-12);
    }

    #[test]
    fn boundary_part_scales_like_h_squared() {
        let ratios: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&h| {
                let s = space(h);
                let f = interpolate(&s, |p| 1.0 - p[0] * p[0] - p[1] * p[1]);
                let z = boundary_part(&f);
                norm_c0(&z) / (s.mesh().h() * s.mesh().h())
            })
            .collect();
        for r in &ratios {
            assert!(*r > 0.0 && *r < 1.0, "{ratios:?}");
        }
        assert!(ratios[2] <= 2.0 * ratios[0]);
    }
}
