use std::sync::Arc;

use super::eoc::{eoc, fit_slope, SlopeFit};
use super::table::Table;
use crate::error::{invalid, Result};
use crate::fe::{
    error_c0, error_c0_nodal, error_h1mu, error_holder_seminorm, error_w1inf, holder_seminorm_on, interpolate,
    Analytic, FeFunction, P2Space, MAX_HOLDER_PAIRS,
};
use crate::geometry::{build_mesh, DomainGeometry};
use crate::linalg::SparseLu;
use crate::operators::{assemble_load, assemble_stiffness, RegParams};
use crate::oracle::{radial_regularized_solve, ExactDisk, RadialProfile, MIN_GRID_N};
use crate::rates::{optimize_rate, RateExponents};
use crate::solver::{
    continuation_solve, contraction_probe, ContinuationResult, CouplingParams, MeshPlan, SolveOptions,
};
use crate::Point;

/// A study's table together with derived rates.
#[derive(Debug, Clone)]
pub struct StudyResult {
    pub table: Table,
    /// Least-squares log-log slopes, by column name.
    pub slopes: Vec<(String, SlopeFit)>,
    /// Consecutive experimental orders, by column name.
    pub eocs: Vec<(String, Vec<f64>)>,
}

impl StudyResult {
    fn new(table: Table) -> Self {
        Self {
            table,
            slopes: Vec::new(),
            eocs: Vec::new(),
        }
    }

    pub fn slope(&self, name: &str) -> Option<SlopeFit> {
        self.slopes.iter().find(|(n, _)| n == name).map(|(_, f)| *f)
    }

    pub fn eoc(&self, name: &str) -> Option<&[f64]> {
        self.eocs.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// Adds the slope of column `y` against column `x` when there are at
    /// least two rows.
    fn fit(&mut self, x: &str, y: &str) -> Result<()> {
        let (Some(xs), Some(ys)) = (self.table.column(x), self.table.column(y)) else {
            return Err(invalid(format!("unknown column {x} or {y}")));
        };
        if xs.len() >= 2 {
            self.slopes.push((y.to_string(), fit_slope(&xs, &ys)?));
        }
        Ok(())
    }

    fn orders(&mut self, x: &str, y: &str) -> Result<()> {
        let (Some(xs), Some(ys)) = (self.table.column(x), self.table.column(y)) else {
            return Err(invalid(format!("unknown column {x} or {y}")));
        };
        if xs.len() >= 2 {
            self.eocs.push((y.to_string(), eoc(&ys, &xs)?));
        }
        Ok(())
    }
}

fn disk_space(radius: f64, h: f64) -> Result<Arc<P2Space>> {
    Ok(P2Space::new(Arc::new(build_mesh(&DomainGeometry::disk(radius)?, h)?)))
}

/// First continuation parameter: large enough that the problem is nearly
/// linear compared with the solution slope, which scales like `R^k`.
fn continuation_start(k: f64, radius: f64) -> f64 {
    2.0 * radius.powf(k).max(1.0)
}

fn schedule_to(k: f64, radius: f64, epsilon: f64) -> Vec<f64> {
    crate::solver::halving_schedule(continuation_start(k, radius), epsilon)
}

fn solve_on(
    space: &Arc<P2Space>,
    k: f64,
    radius: f64,
    epsilon: f64,
    opts: &SolveOptions,
) -> Result<ContinuationResult> {
    continuation_solve(
        &MeshPlan::Fixed(Arc::clone(space)),
        k,
        &schedule_to(k, radius, epsilon),
        opts,
        None,
    )
}

fn oracle(k: f64, radius: f64, epsilon: f64, tol: f64) -> Result<RadialProfile> {
    radial_regularized_solve(&RegParams::new(epsilon, k)?, radius, MIN_GRID_N, tol)
}

/// Rate exponents and `lambda(theta)` for each requested `theta`.
pub fn rates_table(k: f64, gamma_max: f64, margin: f64, thetas: &[f64]) -> Result<(RateExponents, Table)> {
    let re = optimize_rate(k, gamma_max, margin)?;
    let mut t = Table::new([
        "k",
        "gamma",
        "alpha",
        "s",
        "r",
        "beta1",
        "beta2",
        "gamma_gap",
        "beta_gap",
        "r_gap",
        "theta",
        "lambda",
    ]);
    for &theta in thetas {
        if !(0.0..1.0).contains(&theta) {
            return Err(invalid(format!("theta must lie in [0, 1), got {theta}")));
        }
        t.push(vec![
            re.k,
            re.gamma,
            re.alpha,
            re.s,
            re.r,
            re.beta1,
            re.beta2,
            re.margins.gamma_gap,
            re.margins.beta_gap,
            re.margins.r_gap,
            theta,
            re.lambda(theta),
        ])?;
    }
    Ok((re, t))
}

/// `W^{1,inf}` error of the P2 interpolant of `x1^3` on disk meshes.
pub fn interpolation_study(radius: f64, h_list: &[f64], lattice_level: usize) -> Result<StudyResult> {
    let g = Analytic::new(|p: Point| p[0].powi(3), |p: Point| [3.0 * p[0] * p[0], 0.0]);
    let mut t = Table::new(["h_target", "h", "w1inf_error"]);
    for &h in h_list {
        let s = disk_space(radius, h)?;
        let f = interpolate(&s, |p| p[0].powi(3));
        t.push(vec![h, s.mesh().h(), error_w1inf(&f, &g, lattice_level)])?;
    }
    let mut r = StudyResult::new(t);
    r.orders("h", "w1inf_error")?;
    r.fit("h", "w1inf_error")?;
    Ok(r)
}

/// Number of uniform radii used for the 1D Holder seminorm.
const RADIAL_HOLDER_POINTS: usize = 1401;

/// Distance between the radial profile `v_eps` and the arrival time on the
/// disk, by 1D computation only. With `theta = 0` only the `C^0` column is
/// produced; otherwise the Holder seminorm of the error and the full
/// `C^{0,theta}` norm are added. On the disk the planar seminorm of a
/// radial function equals the 1D seminorm along a radius.
pub fn epsilon_study(k: f64, radius: f64, theta: f64, eps_list: &[f64], oracle_tol: f64) -> Result<StudyResult> {
    if !(0.0..1.0).contains(&theta) {
        return Err(invalid(format!("theta must lie in [0, 1), got {theta}")));
    }
    let exact = ExactDisk::new(k, radius)?;
    let with_holder = theta > 0.0;
    let mut t = if with_holder {
        Table::new(["epsilon", "c0_error", "holder_seminorm", "holder_error"])
    } else {
        Table::new(["epsilon", "c0_error"])
    };
    for &eps in eps_list {
        let prof = oracle(k, radius, eps, oracle_tol)?;
        let c0 = prof
            .radii()
            .iter()
            .zip(prof.values())
            .map(|(&r, &v)| (v - exact.profile(r)).abs())
            .fold(0.0, f64::max);
        if with_holder {
            let n = RADIAL_HOLDER_POINTS - 1;
            let pts: Vec<Point> = (0..=n).map(|i| [radius * i as f64 / n as f64, 0.0]).collect();
            let vals: Vec<f64> = pts.iter().map(|p| prof.value_at(p[0]) - exact.profile(p[0])).collect();
            let semi = holder_seminorm_on(&pts, &vals, theta, MAX_HOLDER_PAIRS)?;
            t.push(vec![eps, c0, semi, c0 + semi])?;
        } else {
            t.push(vec![eps, c0])?;
        }
    }
    let mut r = StudyResult::new(t);
    r.fit("epsilon", "c0_error")?;
    if with_holder {
        r.fit("epsilon", "holder_error")?;
    }
    Ok(r)
}

/// Discretization error at fixed `eps` against the radial profile.
pub fn h_study(
    k: f64,
    radius: f64,
    epsilon: f64,
    h_list: &[f64],
    oracle_tol: f64,
    mu: f64,
    opts: &SolveOptions,
) -> Result<StudyResult> {
    let prof = oracle(k, radius, epsilon, oracle_tol)?;
    let mut t = Table::new([
        "h_target",
        "h",
        "dofs",
        "iterations",
        "final_residual",
        "c0_nodal_error",
        "c0_error",
        "h1mu_error",
    ]);
    for &h in h_list {
        let s = disk_space(radius, h)?;
        let res = solve_on(&s, k, radius, epsilon, opts)?;
        let u = res.solution();
        t.push(vec![
            h,
            s.mesh().h(),
            s.n_dofs() as f64,
            res.report().iterations as f64,
            res.report().final_residual,
            error_c0_nodal(u, &prof),
            error_c0(u, &prof),
            error_h1mu(u, &prof, mu)?,
        ])?;
    }
    let mut r = StudyResult::new(t);
    for c in ["c0_nodal_error", "c0_error", "h1mu_error"] {
        r.orders("h", c)?;
        r.fit("h", c)?;
    }
    Ok(r)
}

/// Total error against the arrival time with `h = c eps^beta`, split into
/// regularization and discretization parts. `theta` must lie in
/// `(0, 1/2)`.
pub fn coupled_study(
    k: f64,
    radius: f64,
    theta: f64,
    cp: &CouplingParams,
    schedule: &[f64],
    oracle_tol: f64,
    opts: &SolveOptions,
) -> Result<StudyResult> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(invalid(format!("theta must lie in (0, 1/2), got {theta}")));
    }
    let mut t = Table::new([
        "epsilon",
        "h",
        "dofs",
        "iterations",
        "c0_total",
        "holder_total",
        "c0_regularization",
        "c0_discretization",
        "ball_distance",
        "rho",
    ]);
    if schedule.is_empty() {
        return Ok(StudyResult::new(t));
    }
    let domain = DomainGeometry::disk(radius)?;
    let exact = ExactDisk::new(k, radius)?;
    // reach the first parameter by continuation on the first coupled mesh
    let first = disk_space(radius, cp.mesh_size(schedule[0]))?;
    let lead = solve_on(&first, k, radius, schedule[0], opts)?;
    let plan = MeshPlan::Coupled { domain, params: *cp };
    let mut res = continuation_solve(&plan, k, schedule, opts, Some(lead.solution()))?;
    for (u, rep) in res.solutions.iter().zip(res.reports.iter_mut()) {
        let eps = rep.epsilon;
        let prof = oracle(k, radius, eps, oracle_tol)?;
        let reg = prof
            .radii()
            .iter()
            .zip(prof.values())
            .map(|(&r, &v)| (v - exact.profile(r)).abs())
            .fold(0.0, f64::max);
        let ball = error_h1mu(u, &prof, cp.mu)?;
        rep.ball_distance = Some(ball);
        let c0 = error_c0(u, &exact);
        t.push(vec![
            eps,
            rep.h,
            u.space().n_dofs() as f64,
            rep.iterations as f64,
            c0,
            c0 + error_holder_seminorm(u, &exact, theta)?,
            reg,
            error_c0(u, &prof),
            ball,
            rep.rho.unwrap_or(f64::NAN),
        ])?;
    }
    let mut r = StudyResult::new(t);
    r.fit("epsilon", "c0_total")?;
    r.fit("epsilon", "holder_total")?;
    Ok(r)
}

/// Inputs of [`probe_study`].
#[derive(Debug, Clone)]
pub struct ProbeStudyParams {
    pub k: f64,
    pub radius: f64,
    pub epsilon: f64,
    pub h_list: Vec<f64>,
    /// Perturbation size is the ball radius `c_ball eps^(-gamma_ball) h^delta`.
    pub coupling: CouplingParams,
    pub trials: usize,
    pub seed: u64,
}

/// Frozen-map contraction ratios about the converged discrete solution,
/// with perturbations sized by the ball radius of each mesh.
pub fn probe_study(p: &ProbeStudyParams, opts: &SolveOptions) -> Result<StudyResult> {
    let rp = RegParams::new(p.epsilon, p.k)?;
    let mut t = Table::new(["h_target", "h", "sigma", "max_ratio", "mean_ratio"]);
    for &h in &p.h_list {
        let s = disk_space(p.radius, h)?;
        let res = solve_on(&s, p.k, p.radius, p.epsilon, opts)?;
        let mh = s.mesh().h();
        let sigma = p.coupling.ball_radius(p.epsilon, mh);
        let pr = contraction_probe(res.solution(), &rp, sigma, p.trials, p.seed, p.coupling.mu)?;
        let mean = pr.ratios.iter().sum::<f64>() / pr.ratios.len() as f64;
        t.push(vec![h, mh, sigma, pr.max_ratio, mean])?;
    }
    let mut r = StudyResult::new(t);
    r.fit("h", "max_ratio")?;
    Ok(r)
}

/// For large `eps` the equation is close to `-Delta u = eps^(1 - 1/k)`;
/// compares the nonlinear discrete solution with the scaled discrete
/// torsion function in `C^0`.
pub fn linear_regime_study(k: f64, radius: f64, epsilon: f64, h: f64, opts: &SolveOptions) -> Result<StudyResult> {
    let s = disk_space(radius, h)?;
    let res = solve_on(&s, k, radius, epsilon, opts)?;
    let u = res.solution();
    let torsion = torsion_function(&s)?;
    let scale = epsilon.powf(1.0 - 1.0 / k);
    let scaled = torsion.scaled(scale);
    let diff = u
        .coefficients()
        .iter()
        .zip(scaled.coefficients())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let size = scaled.coefficients().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut t = Table::new([
        "epsilon",
        "h",
        "iterations",
        "c0_difference",
        "c0_scaled_torsion",
        "relative_difference",
    ]);
    t.push(vec![
        epsilon,
        s.mesh().h(),
        res.report().iterations as f64,
        diff,
        size,
        diff / size,
    ])?;
    Ok(StudyResult::new(t))
}

/// Discrete solution of `-Delta tau = 1`, `tau = 0` on the boundary.
pub fn torsion_function(space: &Arc<P2Space>) -> Result<FeFunction> {
    let k = assemble_stiffness(space);
    let b = assemble_load(space, |_| 1.0);
    let x = SparseLu::factor(&k)?.solve(&b, 1e-14)?;
    FeFunction::from_interior(space, &x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_rows_per_theta() {
        let (re, t) = rates_table(2.0, 7.0, 1e-3, &[0.0, 0.25]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.column("lambda").unwrap()[1], re.lambda(0.25));
        assert!(rates_table(2.0, 7.0, 1e-3, &[1.0]).is_err());
    }

    #[test]
    fn single_epsilon_has_no_slope() {
        let r = epsilon_study(2.0, 1.0, 0.25, &[0.2], 1e-9).unwrap();
        assert_eq!(r.table.len(), 1);
        assert!(r.slopes.is_empty());
        let c0_only = epsilon_study(2.0, 1.0, 0.0, &[0.2, 0.1], 1e-9).unwrap();
        assert_eq!(c0_only.table.columns, vec!["epsilon", "c0_error"]);
        assert!(c0_only.slope("c0_error").is_some());
    }

    #[test]
    fn empty_coupled_schedule() {
        let cp = CouplingParams::new(2.0, 1.25, 1.1, 1.0, 1.0, 3.0).unwrap();
        let r = coupled_study(2.0, 1.0, 0.25, &cp, &[], 1e-9, &SolveOptions::default()).unwrap();
        assert!(r.table.is_empty());
        assert!(coupled_study(2.0, 1.0, 0.5, &cp, &[0.4], 1e-9, &SolveOptions::default()).is_err());
    }

    #[test]
    fn torsion_matches_closed_form() {
        // -Delta tau = 1 on the unit disk: tau = (1 - r^2)/4, exact in P2
        // up to the polygonal boundary
        let s = disk_space(1.0, 0.1).unwrap();
        let tau = torsion_function(&s).unwrap();
        let c = tau.evaluate([0.0, 0.0]).unwrap();
        assert!((c - 0.25).abs() < 5e-3, "{c}");
    }

    #[test]
    fn single_h_has_no_order() {
        let r = h_study(2.0, 1.0, 0.5, &[0.3], 1e-9, 3.0, &SolveOptions::default()).unwrap();
        assert!(r.eocs.is_empty());
        assert_eq!(r.table.len(), 1);
    }
}
