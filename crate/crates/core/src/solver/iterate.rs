use std::fmt;
use std::str::FromStr;

use super::report::SolveReport;
use crate::error::{invalid, Error, Result};
use crate::fe::{norm_h1mu, FeFunction, DEFAULT_MU};
use crate::linalg::SparseLu;
use crate::operators::{assemble_linearized, assemble_residual, assemble_system, ellipticity_report, RegParams};

/// Which reference the linearization is taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationMode {
    /// `w_ref` is the current iterate, with step halving.
    Newton,
    /// `w_ref` is fixed for the whole solve; undamped.
    Frozen,
}

impl IterationMode {
    pub fn name(&self) -> &'static str {
        match self {
            IterationMode::Newton => "newton",
            IterationMode::Frozen => "frozen",
        }
    }
}

impl fmt::Display for IterationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IterationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "newton" => Ok(IterationMode::Newton),
            "frozen" => Ok(IterationMode::Frozen),
            other => Err(invalid(format!("unknown iteration mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: IterationMode,
    /// Absolute tolerance on the max-norm of the residual vector.
    pub tol: f64,
    pub max_iter: usize,
    /// Exponent of the `H^{1,mu}` norm used for step-contraction estimates.
    pub mu: f64,
    /// Step halvings tried when a Newton step increases the residual.
    pub max_halvings: usize,
    /// Linearization point in frozen mode; the initial guess when `None`.
    pub frozen_reference: Option<FeFunction>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mode: IterationMode::Newton,
            tol: 1e-10,
            max_iter: 50,
            mu: DEFAULT_MU,
            max_halvings: 10,
            frozen_reference: None,
        }
    }
}

impl SolveOptions {
    pub fn frozen(reference: FeFunction) -> Self {
        Self {
            mode: IterationMode::Frozen,
            frozen_reference: Some(reference),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.mu >= 1.0) {
            return Err(invalid(format!("mu must be at least 1, got {}", self.mu)));
        }
        Ok(())
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `T w = w - A(w_ref)^{-1} R(w)`.
pub fn apply_t(w: &FeFunction, w_ref: &FeFunction, rp: &RegParams) -> Result<FeFunction> {
    let lu = SparseLu::factor(&assemble_linearized(w_ref, rp)?)?;
    apply_t_factored(&lu, w, rp, 1e-14)
}

pub(crate) fn apply_t_factored(lu: &SparseLu, w: &FeFunction, rp: &RegParams, lin_tol: f64) -> Result<FeFunction> {
    let r = assemble_residual(w, rp)?;
    let d = lu.solve(&r, lin_tol)?;
    Ok(w.axpy(-1.0, &FeFunction::from_interior(w.space(), &d)?))
}

/// Iterates `T` from `init` until the residual max-norm is at most `tol`.
pub fn solve_regularized(rp: &RegParams, init: &FeFunction, opts: &SolveOptions) -> Result<(FeFunction, SolveReport)> {
    opts.validate()?;
    init.ensure_in_vh()?;
    let space = init.space();
    let lin_tol = 0.01 * opts.tol;
    let frozen = match opts.mode {
        IterationMode::Frozen => {
            let reference = opts.frozen_reference.as_ref().unwrap_or(init);
            Some(SparseLu::factor(&assemble_linearized(reference, rp)?)?)
        }
        IterationMode::Newton => None,
    };

    let mut w = init.clone();
    let mut r = assemble_residual(&w, rp)?;
    let mut rn = max_abs(&r);
    let mut history = vec![rn];
    let mut damping = Vec::new();
    let mut contraction = Vec::new();
    let mut best = rn;
    let mut prev_step: Option<f64> = None;
    let mut iterations = 0;

    while rn > opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: rn,
            });
        }
        let d = match &frozen {
            Some(lu) => lu.solve(&r, lin_tol)?,
            None => {
                let (a, _) = assemble_system(&w, rp)?;
                SparseLu::factor(&a)?.solve(&r, lin_tol)?
            }
        };
        let dir = FeFunction::from_interior(space, &d)?;
        let mut t = 1.0;
        let (next, next_r) = loop {
            let cand = w.axpy(-t, &dir);
            let cr = assemble_residual(&cand, rp)?;
            let done = frozen.is_some() || max_abs(&cr) < rn || damping_exhausted(t, opts.max_halvings);
            if done {
                break (cand, cr);
            }
            t *= 0.5;
        };
        let step = t * norm_h1mu(&dir, opts.mu)?;
        if let Some(p) = prev_step {
            if p > 0.0 {
                contraction.push(step / p);
            }
        }
        prev_step = Some(step);
        damping.push(t);
        w = next;
        r = next_r;
        rn = max_abs(&r);
        iterations += 1;
        history.push(rn);
        if !rn.is_finite() || rn > 10.0 * best {
            return Err(Error::Divergence {
                iteration: iterations,
                residual: rn,
                best,
            });
        }
        best = best.min(rn);
    }

    let report = SolveReport {
        epsilon: rp.epsilon(),
        h: space.mesh().h(),
        k: rp.k(),
        mode: opts.mode,
        iterations,
        final_residual: rn,
        residual_history: history,
        damping,
        contraction_estimates: contraction,
        rho: None,
        ball_distance: None,
        ellipticity: ellipticity_report(&w, rp),
    };
    Ok((w, report))
}

fn damping_exhausted(t: f64, max_halvings: usize) -> bool {
    t <= 0.5f64.powi(max_halvings as i32)
}
