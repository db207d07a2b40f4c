use crate::error::{invalid, Result};

/// Regularization parameter `eps > 0` and curvature power `k > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegParams {
    epsilon: f64,
    k: f64,
}

impl RegParams {
    pub fn new(epsilon: f64, k: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(k > 1.0 && k.is_finite()) {
            return Err(invalid(format!("k must exceed 1, got {k}")));
        }
        Ok(Self { epsilon, k })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(epsilon, self.k)
    }
}

/// `|z|_eps = sqrt(|z|^2 + eps^2)`.
#[inline]
pub fn f_eps(z: [f64; 2], rp: &RegParams) -> f64 {
    (z[0] * z[0] + z[1] * z[1] + rp.epsilon * rp.epsilon).sqrt()
}

#[inline]
pub fn f_eps_grad(z: [f64; 2], rp: &RegParams) -> [f64; 2] {
    let f = f_eps(z, rp);
    [z[0] / f, z[1] / f]
}

/// `delta_ij / |z|_eps - z_i z_j / |z|_eps^3`, symmetric positive definite.
#[inline]
pub fn f_eps_hess(z: [f64; 2], rp: &RegParams) -> [[f64; 2]; 2] {
    let f = f_eps(z, rp);
    let f3 = f * f * f;
    let off = -z[0] * z[1] / f3;
    [[1.0 / f - z[0] * z[0] / f3, off], [off, 1.0 / f - z[1] * z[1] / f3]]
}

/// Eigenvalues `(eps^2 / |z|_eps^3, 1 / |z|_eps)` of the Hessian: the first
/// along `z`, the second orthogonal to it.
pub fn hessian_eigen_bounds(z: [f64; 2], rp: &RegParams) -> (f64, f64) {
    let f = f_eps(z, rp);
    (rp.epsilon * rp.epsilon / (f * f * f), 1.0 / f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rp(eps: f64) -> RegParams {
        RegParams::new(eps, 2.0).unwrap()
    }

    #[test]
    fn origin_values() {
        let r = rp(1.0);
        assert_eq!(f_eps([0.0, 0.0], &r), 1.0);
        assert_eq!(f_eps_grad([0.0, 0.0], &r), [0.0, 0.0]);
        assert_eq!(f_eps_hess([0.0, 0.0], &r), [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(hessian_eigen_bounds([0.0, 0.0], &rp(0.5)), (2.0, 2.0));
    }

    #[test]
    fn vanishing_eps_gives_euclidean_norm() {
        let r = rp(1e-12);
        assert!((f_eps([3.0, 4.0], &r) - 5.0).abs() < 1e-12);
        let g = f_eps_grad([3.0, 4.0], &r);
        assert!((g[0] - 0.6).abs() < 1e-12 && (g[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_unit_gradient() {
        let (lo, hi) = hessian_eigen_bounds([1.0, 0.0], &rp(0.1));
        assert!((hi - 0.995_037_190_209_989).abs() < 1e-12);
        assert!((lo - 0.009_851_853_368_415_7).abs() < 1e-12);
        assert!((hi / lo - 101.0).abs() < 1e-9);
        // cross-check against the symmetric 2x2 eigenvalue formula
        let z = [0.6, -0.8];
        let h = f_eps_hess(z, &rp(0.1));
        let tr = h[0][0] + h[1][1];
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let disc = (tr * tr / 4.0 - det).sqrt();
        let (a, b) = hessian_eigen_bounds(z, &rp(0.1));
        assert!((tr / 2.0 - disc - a).abs() < 1e-12);
        assert!((tr / 2.0 + disc - b).abs() < 1e-12);
    }

    #[test]
    fn condition_ratio_sweep() {
        // Lambda / lambda = (|z|^2 + eps^2) / eps^2 <= 1 + c0^2 / eps^2 for |z| <= c0
        let c0 = 2.0;
        for eps in [0.05, 0.2, 1.0] {
            for i in 0..=40 {
                let t = c0 * i as f64 / 40.0;
                let (lo, hi) = hessian_eigen_bounds([t * 0.6, t * 0.8], &rp(eps));
                assert!(lo > 0.0);
                assert!(hi / lo <= 1.0 + c0 * c0 / (eps * eps) + 1e-9);
            }
        }
    }

    #[test]
    fn rejects_invalid() {
        assert!(RegParams::new(0.0, 2.0).is_err());
        assert!(RegParams::new(0.1, 1.0).is_err());
        assert!(RegParams::new(f64::NAN, 2.0).is_err());
    }

    proptest! {
        #[test]
        fn derivatives_match_finite_differences(x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let r = RegParams::new(0.3, 2.0).unwrap();
            let step = 1e-5;
            let g = f_eps_grad([x, y], &r);
            let h = f_eps_hess([x, y], &r);
            let fd_g = [
                (f_eps([x + step, y], &r) - f_eps([x - step, y], &r)) / (2.0 * step),
                (f_eps([x, y + step], &r) - f_eps([x, y - step], &r)) / (2.0 * step),
            ];
            for i in 0..2 {
                prop_assert!((g[i] - fd_g[i]).abs() <= 1e-7 * g[i].abs().max(1.0));
            }
            let dirs = [[step, 0.0], [0.0, step]];
            for j in 0..2 {
                let p = f_eps_grad([x + dirs[j][0], y + dirs[j][1]], &r);
                let m = f_eps_grad([x - dirs[j][0], y - dirs[j][1]], &r);
                for i in 0..2 {
                    let fd = (p[i] - m[i]) / (2.0 * step);
                    prop_assert!((h[i][j] - fd).abs() <= 1e-7 * h[i][j].abs().max(1.0));
                }
            }
            prop_assert_eq!(h[0][1], h[1][0]);
            prop_assert!(h[0][0] > 0.0 && h[0][0] * h[1][1] - h[0][1] * h[1][0] > 0.0);
        }
    }
}
