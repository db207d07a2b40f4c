use crate::error::{invalid, Result};

/// `log(e_i / e_{i+1}) / log(s_i / s_{i+1})` for consecutive pairs.
pub fn eoc(errors: &[f64], steps: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != steps.len() || errors.len() < 2 {
        return Err(invalid("eoc needs two or more errors and matching step sizes"));
    }
    if errors.iter().chain(steps).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid("errors and step sizes must be positive"));
    }
    if steps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("step sizes must be strictly decreasing"));
    }
    Ok(errors
        .windows(2)
        .zip(steps.windows(2))
        .map(|(e, s)| (e[0] / e[1]).ln() / (s[0] / s[1]).ln())
        .collect())
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
}

pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("slope fit needs two or more points"));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid("slope fit needs positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("slope fit needs distinct abscissae"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}
