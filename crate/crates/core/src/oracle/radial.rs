//! Radial reduction of the regularized equation on a disk of radius `R`.
//!
//! With `p = v'`, `g(p) = p / sqrt(eps^2 + p^2)` and
//! `F(p) = (eps^2 + p^2)^(-1/(2k))`, the equation
//! `(1/r)(r g(v'))' = -F(v')` integrates once to
//!
//! ```text
//! r g(p(r)) = -int_0^r rho F(p(rho)) d rho,    v(r) = -int_r^R p.
//! ```
//!
//! Both integrals are discretized by the trapezoidal rule on a uniform grid,
//! which gives an explicit march in `r` where every node needs one monotone
//! scalar solve. The `r = 0` singularity never appears because the flux
//! form is divided by `r_j > 0` only. The error has an expansion in `h^2`,
//! so runs on `n` and `2n` cells yield a Richardson estimate and an
//! extrapolated profile; `n` is doubled until the estimate meets `tol`.

use std::io::{Read, Write};

use crate::error::{invalid, Error, Result};
use crate::fe::ScalarField;
use crate::operators::RegParams;
use crate::Point;

pub const MIN_GRID_N: usize = 64;
pub const MAX_GRID_N: usize = 1 << 22;

/// Tabulated radial solution `v(r)` with its slope, on a uniform grid.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    rp: RegParams,
    radius: f64,
    tol: f64,
    error_estimate: f64,
    radii: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

fn g(p: f64, eps2: f64) -> f64 {
    p / (eps2 + p * p).sqrt()
}

/// Solves `g(p) + c F(p) = target` for `p <= 0`; the left side is strictly
/// increasing there.
fn scalar_solve(target: f64, c: f64, eps2: f64, inv_2k: f64, guess: f64) -> Result<f64> {
    let phi = |p: f64| {
        let q = eps2 + p * p;
        let val = p / q.sqrt() + c * q.powf(-inv_2k);
        let der = eps2 / (q * q.sqrt()) - c * 2.0 * inv_2k * p * q.powf(-inv_2k - 1.0);
        (val - target, der)
    };
    let mut hi = 0.0;
    let mut lo = -1.0;
    while phi(lo).0 > 0.0 {
        lo *= 2.0;
        if lo < -1e15 {
            return Err(Error::Oracle(format!("no radial slope reaches flux level {target}")));
        }
    }
    let mut p = guess.clamp(lo, hi);
    for _ in 0..200 {
        let (f, d) = phi(p);
        if f == 0.0 {
            return Ok(p);
        }
        if f > 0.0 {
            hi = p;
        } else {
            lo = p;
        }
        let mut next = p - f / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - p).abs() <= 1e-16 * p.abs().max(1e-300) || hi - lo <= 2e-16 * lo.abs() {
            return Ok(next);
        }
        p = next;
    }
    Ok(p)
}

/// Node values `v_j` and slopes `p_j` on `n` uniform cells.
fn march(rp: &RegParams, radius: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = radius / n as f64;
    let eps2 = rp.epsilon() * rp.epsilon();
    let inv_2k = 0.5 / rp.k();
    let f = |p: f64| (eps2 + p * p).powf(-inv_2k);
    let mut p = vec![0.0; n + 1];
    // running value of -int_0^{r_{j-1}} rho F, minus the half-weight of node j-1
    let mut carry = 0.0;
    for j in 1..=n {
        let r_prev = (j - 1) as f64 * h;
        let r = j as f64 * h;
        let b = carry - 0.5 * h * r_prev * f(p[j - 1]);
        p[j] = scalar_solve(b / r, 0.5 * h, eps2, inv_2k, p[j - 1])?;
        carry = b - 0.5 * h * r * f(p[j]);
        debug_assert!((carry - r * g(p[j], eps2)).abs() <= 1e-12 * carry.abs().max(1e-300) + 1e-15);
    }
    let mut v = vec![0.0; n + 1];
    for j in (0..n).rev() {
        v[j] = v[j + 1] - 0.5 * h * (p[j] + p[j + 1]);
    }
    Ok((v, p))
}

/// Computes the radial profile to an estimated max error of `tol`.
pub fn radial_regularized_solve(rp: &RegParams, radius: f64, grid_n: usize, tol: f64) -> Result<RadialProfile> {
    if grid_n < MIN_GRID_N {
        return Err(invalid(format!("grid_n must be at least {MIN_GRID_N}, got {grid_n}")));
    }
    if !(tol > 0.0 && tol <= 1e-8) {
        return Err(invalid(format!("tol must lie in (0, 1e-8], got {tol}")));
    }
    if !(radius > 0.0) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    let mut n = grid_n;
    let mut coarse = march(rp, radius, n)?;
    loop {
        if 2 * n > MAX_GRID_N {
            return Err(Error::Oracle(format!("tolerance {tol:e} not reached with {n} cells")));
        }
        let fine = march(rp, radius, 2 * n)?;
        let mut est: f64 = 0.0;
        for j in 0..=n {
            est = est.max((fine.0[2 * j] - coarse.0[j]).abs() / 3.0);
        }
        if est <= tol {
            let extrapolate =
                |f: &[f64], c: &[f64]| -> Vec<f64> { (0..=n).map(|j| f[2 * j] + (f[2 * j] - c[j]) / 3.0).collect() };
            let values = extrapolate(&fine.0, &coarse.0);
            let slopes = extrapolate(&fine.1, &coarse.1);
            let h = radius / n as f64;
            let mut radii: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
            radii[n] = radius;
            return Ok(RadialProfile {
                rp: *rp,
                radius,
                tol,
                error_estimate: est,
                radii,
                values,
                slopes,
            });
        }
        n *= 2;
        coarse = fine;
    }
}

/// Cubic Lagrange interpolation on four consecutive uniform nodes; returns
/// value and derivative.
fn cubic(ys: &[f64], x0: f64, h: f64, x: f64) -> (f64, f64) {
    let t = (x - x0) / h;
    let nodes = [0.0, 1.0, 2.0, 3.0];
    let mut val = 0.0;
    let mut der = 0.0;
    for i in 0..4 {
        let mut li = 1.0;
        let mut dli = 0.0;
        for j in 0..4 {
            if j == i {
                continue;
            }
            let denom = nodes[i] - nodes[j];
            // product rule, accumulated
            dli = dli * (t - nodes[j]) / denom + li / denom;
            li *= (t - nodes[j]) / denom;
        }
        val += ys[i] * li;
        der += ys[i] * dli;
    }
    (val, der / h)
}

impl RadialProfile {
    pub fn reg_params(&self) -> &RegParams {
        &self.rp
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Richardson estimate of the unextrapolated fine-grid error; an upper
    /// estimate for the stored values.
    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    fn window(&self, r: f64) -> (usize, f64) {
        let n = self.radii.len() - 1;
        let h = self.radius / n as f64;
        let i = ((r / h).floor() as usize).min(n - 1);
        let j0 = i.saturating_sub(1).min(n - 3);
        (j0, h)
    }

    /// `v(r)` for `0 <= r <= R`.
    pub fn value_at(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, self.radius);
        let (j0, h) = self.window(r);
        cubic(&self.values[j0..j0 + 4], j0 as f64 * h, h, r).0
    }

    /// `v'(r)` from the interpolated slope table.
    pub fn slope_at(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, self.radius);
        let (j0, h) = self.window(r);
        cubic(&self.slopes[j0..j0 + 4], j0 as f64 * h, h, r).0
    }

    /// `v(|p|)`, rejecting points outside the disk.
    pub fn evaluate(&self, p: Point) -> Result<f64> {
        let r = p[0].hypot(p[1]);
        if r > self.radius * (1.0 + 1e-12) {
            return Err(Error::PointOutside(p[0], p[1]));
        }
        Ok(self.value_at(r))
    }

    /// Writes `r,v` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "v"])?;
        for (r, v) in self.radii.iter().zip(&self.values) {
            w.write_record([format!("{r:?}"), format!("{v:?}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads back the `(r, v)` pairs written by [`Self::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
        let mut rd = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse {
                    line: i + 2,
                    message: format!("bad field {k}"),
                })
            };
            rows.push((parse(0)?, parse(1)?));
        }
        Ok(rows)
    }
}

impl ScalarField for RadialProfile {
    /// Points marginally outside the disk (rounding on the boundary) are
    /// clamped to `r = R`.
    fn value(&self, p: Point) -> f64 {
        self.value_at(p[0].hypot(p[1]))
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let s = self.slope_at(r) / r;
        [s * p[0], s * p[1]]
    }
}

/// The profile as a function on the plane, `p -> v(|p|)`.
pub fn radial_to_2d(profile: &RadialProfile) -> &dyn ScalarField {
    profile
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ExactDisk;

    fn profile(eps: f64, tol: f64) -> RadialProfile {
        radial_regularized_solve(&RegParams::new(eps, 2.0).unwrap(), 1.0, 64, tol).unwrap()
    }

    #[test]
    fn boundary_value_and_monotonicity() {
        let p = profile(0.1, 1e-9);
        assert_eq!(*p.values().last().unwrap(), 0.0);
        assert_eq!(p.slopes()[0], 0.0);
        assert!(p.values().windows(2).all(|w| w[1] < w[0]));
        assert!(p.slopes()[1..].iter().all(|&s| s < 0.0));
        assert!(p.error_estimate() <= 1e-9);
    }

    #[test]
    fn rejects_bad_arguments() {
        let rp = RegParams::new(0.1, 2.0).unwrap();
        assert!(radial_regularized_solve(&rp, 1.0, 32, 1e-9).is_err());
        assert!(radial_regularized_solve(&rp, 1.0, 64, 1e-6).is_err());
        assert!(radial_regularized_solve(&rp, 0.0, 64, 1e-9).is_err());
    }

    #[test]
    fn large_epsilon_is_scaled_torsion() {
        let eps: f64 = 1e3;
        let p = profile(eps, 1e-9);
        for i in 0..=10 {
            let r = i as f64 / 10.0;
            let lin = eps.powf(0.5) * (1.0 - r * r) / 4.0;
            assert!((p.value_at(r) - lin).abs() <= 0.01 * lin.max(1e-12) + 1e-12);
        }
    }

    #[test]
    fn converges_to_disk_arrival_time() {
        let exact = ExactDisk::new(2.0, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [0.1, 0.05, 0.025] {
            let p = profile(eps, 1e-9);
            let err = p
                .radii()
                .iter()
                .zip(p.values())
                .map(|(&r, &v)| (v - exact.profile(r)).abs())
                .fold(0.0, f64::max);
            assert!(err < prev);
            prev = err;
            // slope stays bounded by the exact C^1 bound plus regularization
            assert!(p.slopes().iter().all(|s| s.abs() <= 1.0 + 1e-9));
        }
    }

    #[test]
    fn doubling_the_grid_changes_little() {
        let rp = RegParams::new(0.1, 2.0).unwrap();
        let a = radial_regularized_solve(&rp, 1.0, 64, 1e-9).unwrap();
        let b = radial_regularized_solve(&rp, 1.0, 2 * a.radii().len(), 1e-9).unwrap();
        assert!((a.value_at(0.0) - b.value_at(0.0)).abs() < 1e-9);
        for r in [0.13, 0.5, 0.77, 0.999] {
            assert!((a.value_at(r) - b.value_at(r)).abs() < 1e-9);
            assert!((a.slope_at(r) - b.slope_at(r)).abs() < 1e-7);
        }
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let ys: Vec<f64> = (0..4).map(|i| (0.5 + 0.1 * i as f64).powi(3)).collect();
        let (v, d) = cubic(&ys, 0.5, 0.1, 0.63);
        assert!((v - 0.63f64.powi(3)).abs() < 1e-14);
        assert!((d - 3.0 * 0.63f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn planar_evaluation() {
        let p = profile(0.2, 1e-9);
        let f = radial_to_2d(&p);
        assert_eq!(f.value([0.0, 0.0]), p.value_at(0.0));
        assert_eq!(f.value([0.0, 0.0]), p.values()[0]);
        assert!(f.value([1.0, 0.0]).abs() < 1e-15);
        let x = [0.3, -0.4];
        assert_eq!(p.evaluate(x).unwrap(), p.value_at(0.5));
        assert!(p.evaluate([0.8, 0.8]).is_err());
        let gr = f.gradient(x);
        assert!((gr[0].hypot(gr[1]) + p.slope_at(0.5)).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip() {
        let p = profile(0.3, 1e-9);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let rows = RadialProfile::read_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), p.radii().len());
        for ((r, v), (r0, v0)) in rows.iter().zip(p.radii().iter().zip(p.values())) {
            assert_eq!(r, r0);
            assert_eq!(v, v0);
        }
    }
}
