use crate::error::{invalid, Result};

/// Parameters of the `eps`-`h` coupling `h = c eps^beta` and of the ball
/// radius `rho = c_ball eps^(-gamma_ball) h^delta` measured in `H^{1,mu}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    pub beta: f64,
    pub c_coupling: f64,
    pub delta: f64,
    pub gamma_ball: f64,
    pub c_ball: f64,
    pub mu: f64,
}

impl CouplingParams {
    /// Checks `beta >= 0`, `c > 0`, `2 < mu < 4` and `1 < delta < 1/2 + 2/mu`.
    /// `beta = 0` (no refinement) is allowed as a sanity configuration.
    pub fn new(beta: f64, c_coupling: f64, delta: f64, gamma_ball: f64, c_ball: f64, mu: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(invalid(format!("beta must be nonnegative, got {beta}")));
        }
        if !(c_coupling > 0.0 && c_ball > 0.0) {
            return Err(invalid("coupling constants must be positive"));
        }
        if !(gamma_ball > 0.0) {
            return Err(invalid(format!("gamma_ball must be positive, got {gamma_ball}")));
        }
        if !(mu > 2.0 && mu < 4.0) {
            return Err(invalid(format!("mu must lie in (2, 4), got {mu}")));
        }
        let upper = 0.5 + 2.0 / mu;
        if !(delta > 1.0 && delta < upper) {
            return Err(invalid(format!("delta must lie in (1, {upper}), got {delta}")));
        }
        Ok(Self {
            beta,
            c_coupling,
            delta,
            gamma_ball,
            c_ball,
            mu,
        })
    }

    pub fn mesh_size(&self, epsilon: f64) -> f64 {
        coupled_mesh_size(self, epsilon)
    }

    /// `rho = c_ball eps^(-gamma_ball) h^delta`.
    pub fn ball_radius(&self, epsilon: f64, h: f64) -> f64 {
        self.c_ball * epsilon.powf(-self.gamma_ball) * h.powf(self.delta)
    }
}

/// `c eps^beta`.
pub fn coupled_mesh_size(cp: &CouplingParams, epsilon: f64) -> f64 {
    cp.c_coupling * epsilon.powf(cp.beta)
}
