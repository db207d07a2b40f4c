use super::iterate::IterationMode;
use crate::operators::EllipticityReport;

/// Column names of [`SolveReport::csv_row`].
pub const REPORT_COLUMNS: [&str; 11] = [
    "epsilon",
    "h",
    "k",
    "mode",
    "iterations",
    "final_residual",
    "rho",
    "ball_distance",
    "min_eig",
    "max_eig",
    "contraction_max",
];

/// Diagnostics of one nonlinear solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub epsilon: f64,
    pub h: f64,
    pub k: f64,
    pub mode: IterationMode,
    /// Accepted updates.
    pub iterations: usize,
    pub final_residual: f64,
    /// Max-norm residual before each update and after the last one.
    pub residual_history: Vec<f64>,
    /// Step-length factor accepted at each update (1 = undamped).
    pub damping: Vec<f64>,
    /// `|w_{m+1} - w_m| / |w_m - w_{m-1}|` in `H^{1,mu}`.
    pub contraction_estimates: Vec<f64>,
    /// Ball radius of the coupled regime, when one is in force.
    pub rho: Option<f64>,
    /// `H^{1,mu}` distance to a reference solution, when available.
    pub ball_distance: Option<f64>,
    pub ellipticity: EllipticityReport,
}

impl SolveReport {
    pub fn contraction_max(&self) -> Option<f64> {
        self.contraction_estimates.iter().copied().reduce(f64::max)
    }

    /// CSV fields in [`REPORT_COLUMNS`] order; missing values are empty.
    pub fn csv_row(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        vec![
            format!("{:?}", self.epsilon),
            format!("{:?}", self.h),
            format!("{:?}", self.k),
            self.mode.name().to_string(),
            self.iterations.to_string(),
            format!("{:?}", self.final_residual),
            opt(self.rho),
            opt(self.ball_distance),
            format!("{:?}", self.ellipticity.lambda_min),
            format!("{:?}", self.ellipticity.lambda_max),
            opt(self.contraction_max()),
        ]
    }
}
