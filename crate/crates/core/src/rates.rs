//! Exponent algebra for the rate of `u_eps -> u`.
//!
//! For a power `k > 1` and parameters `alpha, gamma, s`:
//!
//! ```text
//! beta1 = (2 - s + alpha (2 - 1/k)) / (gamma (2 - 1/k) + 1/k - 1)
//! beta2 = (alpha + k s) / (gamma - k - 1)
//! ```
//!
//! Admissible choices need `gamma > 1 + k`, `beta1 > beta2` and
//! `0 < r < alpha / gamma`; the resulting estimate is `eps^min(r, s)` in
//! `C^0` and `eps^(min(r, s)(1 - theta))` in `C^{0, theta}`.

use crate::error::{invalid, Error, Result};
use crate::solver::CouplingParams;

/// Number of points in the `gamma` search grid.
pub const GAMMA_GRID_POINTS: usize = 4096;

pub fn beta_exponents(k: f64, alpha: f64, gamma: f64, s: f64) -> Result<(f64, f64)> {
    if !(k > 1.0) {
        return Err(invalid(format!("k must exceed 1, got {k}")));
    }
    if !(gamma > 1.0 + k) {
        return Err(invalid(format!("gamma must exceed 1 + k = {}, got {gamma}", 1.0 + k)));
    }
    if !(alpha > 0.0 && s > 0.0) {
        return Err(invalid(format!("alpha and s must be positive, got {alpha}, {s}")));
    }
    let q = 2.0 - 1.0 / k;
    let beta1 = (2.0 - s + alpha * q) / (gamma * q + 1.0 / k - 1.0);
    let beta2 = (alpha + k * s) / (gamma - k - 1.0);
    Ok((beta1, beta2))
}

/// Coefficients of `beta1 = (2 + alpha b) / d1` and `beta2 = alpha a` once
/// `s = alpha / gamma` is substituted.
fn linear_coefficients(k: f64, gamma: f64) -> (f64, f64, f64) {
    let d1 = gamma * (2.0 - 1.0 / k) + 1.0 / k - 1.0;
    let a = (1.0 + k / gamma) / (gamma - k - 1.0);
    let b = 2.0 - 1.0 / k - 1.0 / gamma;
    (a, b, d1)
}

/// The unique `alpha > 0` with `beta2 = (1 - shrink) beta1` under
/// `s = alpha / gamma`, or `None` when no positive solution exists.
fn alpha_for_ratio(k: f64, gamma: f64, shrink: f64) -> Option<f64> {
    let (a, b, d1) = linear_coefficients(k, gamma);
    let keep = 1.0 - shrink;
    let den = a - keep * b / d1;
    let alpha = keep * (2.0 / d1) / den;
    (d1 > 0.0 && den > 0.0 && alpha.is_finite() && alpha > 0.0).then_some(alpha)
}

/// `alpha` solving `beta1 = beta2` with `s = alpha / gamma`.
pub fn equality_alpha(k: f64, gamma: f64) -> Result<f64> {
    if !(k > 1.0 && gamma > 1.0 + k) {
        return Err(invalid(format!(
            "need k > 1 and gamma > 1 + k, got k = {k}, gamma = {gamma}"
        )));
    }
    alpha_for_ratio(k, gamma, 0.0)
        .ok_or_else(|| Error::Infeasible(format!("beta1 = beta2 has no positive root at gamma = {gamma}")))
}

/// How far each strict constraint is from being violated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityMargins {
    /// `gamma - (1 + k)`.
    pub gamma_gap: f64,
    /// `beta1 - beta2`.
    pub beta_gap: f64,
    /// `alpha / gamma - r`.
    pub r_gap: f64,
    /// `1 - beta2 / beta1`.
    pub beta_relative: f64,
    /// `1 - r gamma / alpha`.
    pub r_relative: f64,
}

impl FeasibilityMargins {
    pub fn all_positive(&self) -> bool {
        self.gamma_gap > 0.0 && self.beta_gap > 0.0 && self.r_gap > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateExponents {
    pub k: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub s: f64,
    pub r: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub margins: FeasibilityMargins,
    /// The maximizer sat on the upper end of the search interval, i.e. the
    /// reported value is a truncation of a supremum.
    pub at_gamma_max: bool,
}

impl RateExponents {
    /// Builds and checks a parameter set.
    pub fn new(k: f64, alpha: f64, gamma: f64, s: f64, r: f64) -> Result<Self> {
        let (beta1, beta2) = beta_exponents(k, alpha, gamma, s)?;
        let margins = FeasibilityMargins {
            gamma_gap: gamma - (1.0 + k),
            beta_gap: beta1 - beta2,
            r_gap: alpha / gamma - r,
            beta_relative: 1.0 - beta2 / beta1,
            r_relative: 1.0 - r * gamma / alpha,
        };
        if !(r > 0.0) {
            return Err(Error::Infeasible(format!("r must be positive, got {r}")));
        }
        if !margins.all_positive() {
            return Err(Error::Infeasible(format!("constraints violated: {margins:?}")));
        }
        Ok(Self {
            k,
            alpha,
            gamma,
            s,
            r,
            beta1,
            beta2,
            margins,
            at_gamma_max: false,
        })
    }

    pub fn min_rs(&self) -> f64 {
        self.r.min(self.s)
    }

    /// Holder-norm rate `min(r, s) (1 - theta)`.
    pub fn lambda(&self, theta: f64) -> f64 {
        self.min_rs() * (1.0 - theta)
    }
}

/// Maximizes `alpha / gamma` over a uniform grid of `gamma` in
/// `(1 + k + margin, gamma_max]` with `s = alpha / gamma`.
///
/// At each grid point `beta1 = beta2` is solved exactly for `alpha`; the
/// result is then backed off so that every strict constraint holds with
/// relative margin at least `margin`: `alpha` is chosen so that
/// `beta2 = (1 - margin) beta1`, and `r = (1 - margin) alpha / gamma`.
pub fn optimize_rate(k: f64, gamma_max: f64, margin: f64) -> Result<RateExponents> {
    if !(k > 1.0) {
        return Err(invalid(format!("k must exceed 1, got {k}")));
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(invalid(format!("margin must lie in (0, 1), got {margin}")));
    }
    let lo = 1.0 + k + margin;
    if !(gamma_max > lo && gamma_max.is_finite()) {
        return Err(invalid(format!("gamma_max must exceed {lo}, got {gamma_max}")));
    }
    let n = GAMMA_GRID_POINTS;
    let mut best: Option<(f64, usize, RateExponents)> = None;
    for i in 1..=n {
        let gamma = if i == n {
            gamma_max
        } else {
            lo + (gamma_max - lo) * i as f64 / n as f64
        };
        let Some(candidate) = backed_off(k, gamma, margin) else {
            continue;
        };
        let objective = candidate.alpha / candidate.gamma;
        if best.as_ref().is_none_or(|(b, _, _)| objective > *b) {
            best = Some((objective, i, candidate));
        }
    }
    let (_, i, mut re) =
        best.ok_or_else(|| Error::Infeasible(format!("no feasible gamma in ({lo}, {gamma_max}] for k = {k}")))?;
    re.at_gamma_max = i == n;
    Ok(re)
}

fn backed_off(k: f64, gamma: f64, margin: f64) -> Option<RateExponents> {
    let mut alpha = alpha_for_ratio(k, gamma, margin)?;
    // guard against rounding pulling the relative margins below `margin`
    for _ in 0..64 {
        let s = alpha / gamma;
        let r = (1.0 - margin) * s;
        if let Ok(re) = RateExponents::new(k, alpha, gamma, s, r) {
            if re.margins.beta_relative >= margin && re.margins.r_relative >= margin {
                return Some(re);
            }
        }
        alpha *= 1.0 - 4.0 * f64::EPSILON;
    }
    None
}

/// The two shapes `eps^lambda` and `eps^(-gamma_ball) h^delta` of the total
/// error bound with unit constants, for `h = c eps^beta`.
pub fn predicted_error_bounds(re: &RateExponents, cp: &CouplingParams, theta: f64, epsilon: f64) -> Result<(f64, f64)> {
    if !(0.0..0.5).contains(&theta) {
        return Err(invalid(format!("theta must lie in [0, 1/2), got {theta}")));
    }
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let h = cp.mesh_size(epsilon);
    Ok((
        epsilon.powf(re.lambda(theta)),
        epsilon.powf(-cp.gamma_ball) * h.powf(cp.delta),
    ))
}
