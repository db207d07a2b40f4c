use std::sync::Arc;

use super::coupling::CouplingParams;
use super::iterate::{solve_regularized, SolveOptions};
use super::report::SolveReport;
use crate::error::{invalid, Error, Result};
use crate::fe::{boundary_correct, FeFunction, P2Space};
use crate::geometry::{build_mesh, DomainGeometry};
use crate::operators::RegParams;

/// Where each continuation stage is solved.
#[derive(Clone)]
pub enum MeshPlan {
    /// One space for every stage.
    Fixed(Arc<P2Space>),
    /// A fresh mesh with `h = c eps^beta` per stage.
    Coupled {
        domain: DomainGeometry,
        params: CouplingParams,
    },
}

/// Solutions and reports of every stage, in schedule order.
#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub solutions: Vec<FeFunction>,
    pub reports: Vec<SolveReport>,
}

impl ContinuationResult {
    pub fn solution(&self) -> &FeFunction {
        self.solutions.last().expect("schedule is nonempty")
    }

    pub fn report(&self) -> &SolveReport {
        self.reports.last().expect("schedule is nonempty")
    }
}

/// Halving schedule `start, start/2, ...` down to and ending at `target`.
pub fn halving_schedule(start: f64, target: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut e = start;
    while e > target * (1.0 + 1e-12) {
        out.push(e);
        e *= 0.5;
    }
    out.push(target);
    out
}

/// Solves for each `eps` of a strictly decreasing schedule, warm-starting
/// every stage from the previous solution (transferred and boundary
/// corrected when the mesh changes). The first stage starts from `init`, or
/// from zero.
pub fn continuation_solve(
    plan: &MeshPlan,
    k: f64,
    schedule: &[f64],
    opts: &SolveOptions,
    init: Option<&FeFunction>,
) -> Result<ContinuationResult> {
    if schedule.is_empty() {
        return Err(invalid("empty continuation schedule"));
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid(format!("schedule must be strictly decreasing: {schedule:?}")));
    }
    let mut solutions: Vec<FeFunction> = Vec::with_capacity(schedule.len());
    let mut reports = Vec::with_capacity(schedule.len());
    let mut current_space: Option<Arc<P2Space>> = None;
    for (stage, &eps) in schedule.iter().enumerate() {
        let wrap = |e: Error| Error::Stage {
            stage,
            epsilon: eps,
            source: Box::new(e),
        };
        let rp = RegParams::new(eps, k).map_err(wrap)?;
        let space = match plan {
            MeshPlan::Fixed(s) => Arc::clone(s),
            MeshPlan::Coupled { domain, params } => {
                let h = params.mesh_size(eps);
                match &current_space {
                    Some(s) if s.mesh().h() <= h => Arc::clone(s),
                    _ => P2Space::new(Arc::new(build_mesh(domain, h).map_err(wrap)?)),
                }
            }
        };
        let start = match solutions.last().or(init) {
            Some(prev) if Arc::ptr_eq(prev.space(), &space) => prev.clone(),
            Some(prev) => boundary_correct(&prev.transfer_to(&space)),
            None => FeFunction::zeros(&space),
        };
        let (u, mut report) = solve_regularized(&rp, &start, opts).map_err(wrap)?;
        if let MeshPlan::Coupled { params, .. } = plan {
            report.rho = Some(params.ball_radius(eps, space.mesh().h()));
        }
        current_space = Some(space);
        solutions.push(u);
        reports.push(report);
    }
    Ok(ContinuationResult { solutions, reports })
}
