use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use super::iterate::apply_t_factored;
use crate::error::{invalid, Result};
use crate::fe::{boundary_correct, interpolate, norm_h1mu, FeFunction, P2Space};
use crate::linalg::SparseLu;
use crate::operators::{assemble_linearized, RegParams};

/// Number of plane-wave modes in a random perturbation.
const MODES: usize = 6;

/// A random smooth member of `V_h`: a few plane waves times the distance to
/// the boundary, interpolated and boundary corrected.
pub fn smooth_perturbation(space: &Arc<P2Space>, rng: &mut ChaCha8Rng) -> FeFunction {
    let waves: Vec<(f64, [f64; 2], f64)> = (0..MODES)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let domain = space.mesh().domain().clone();
    boundary_correct(&interpolate(space, |p| {
        let bump = (-domain.signed_distance(p)).max(0.0);
        bump * waves
            .iter()
            .map(|(a, w, ph)| a * (w[0] * p[0] + w[1] * p[1] + ph).sin())
            .sum::<f64>()
    }))
}

#[derive(Debug, Clone)]
pub struct ProbeResult {
    /// `|Tv - Tw| / |v - w|` per trial.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// `H^{1,mu}` size of each perturbation about the reference.
    pub sigma: f64,
}

/// Empirical Lipschitz constant of the frozen map `T` (linearized at
/// `w_ref`) on pairs `w_ref + p1, w_ref + p2` with `|p_i| = sigma` in
/// `H^{1,mu}`, drawn from a seeded generator.
pub fn contraction_probe(
    w_ref: &FeFunction,
    rp: &RegParams,
    sigma: f64,
    trials: usize,
    seed: u64,
    mu: f64,
) -> Result<ProbeResult> {
    if !(sigma > 0.0) || trials == 0 {
        return Err(invalid("probe needs sigma > 0 and at least one trial"));
    }
    let space = w_ref.space();
    let lu = SparseLu::factor(&assemble_linearized(w_ref, rp)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(trials);
    let draw = |rng: &mut ChaCha8Rng| -> Result<FeFunction> {
        let p = smooth_perturbation(space, rng);
        let n = norm_h1mu(&p, mu)?;
        Ok(p.scaled(sigma / n))
    };
    for _ in 0..trials {
        let w = w_ref.axpy(1.0, &draw(&mut rng)?);
        let v = w_ref.axpy(1.0, &draw(&mut rng)?);
        let tw = apply_t_factored(&lu, &w, rp, 1e-14)?;
        let tv = apply_t_factored(&lu, &v, rp, 1e-14)?;
        let num = norm_h1mu(&tv.axpy(-1.0, &tw), mu)?;
        let den = norm_h1mu(&v.axpy(-1.0, &w), mu)?;
        ratios.push(num / den);
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(ProbeResult {
        ratios,
        max_ratio,
        sigma,
    })
}
