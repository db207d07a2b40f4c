//! Plain `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated. Unknown keys are rejected so that typos do not silently fall
//! back to defaults.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::fe::DEFAULT_MU;
use crate::geometry::DomainGeometry;
use crate::solver::{CouplingParams, IterationMode, SolveOptions};

/// Every accepted key with its default (empty when there is none) and a
/// short description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("domain", "disk", "disk or ellipse"),
    ("R", "1", "disk radius"),
    ("a", "1", "ellipse semi-axis along x"),
    ("b", "0.5", "ellipse semi-axis along y"),
    ("k", "2", "curvature power, > 1"),
    ("epsilon", "0.25", "target regularization parameter"),
    (
        "schedule",
        "",
        "continuation schedule; default halves from 2 down to epsilon",
    ),
    ("mesh.h", "0.1", "target mesh size"),
    ("coupled", "false", "use h = c_coupling * eps^beta per stage"),
    ("beta", "2", "coupling exponent"),
    ("c_coupling", "1.25", "coupling constant"),
    ("delta", "1.1", "ball-radius exponent, 1 < delta < 1/2 + 2/mu"),
    ("gamma_ball", "1", "ball-radius eps exponent"),
    ("c_ball", "0.1", "ball-radius constant"),
    ("mu", "3", "Sobolev exponent, 2 < mu < 4"),
    ("theta", "0.25", "Holder exponent"),
    ("thetas", "0,0.25", "Holder exponents for the rates table"),
    ("tol", "1e-10", "nonlinear tolerance (max-norm of residual)"),
    ("max_iter", "50", "iterations per continuation stage"),
    ("mode", "newton", "newton or frozen"),
    ("eps_list", "0.2,0.1,0.05,0.025", "epsilon values of an epsilon study"),
    ("h_list", "0.2,0.1,0.05", "mesh sizes of an h study"),
    ("gamma_max", "7", "upper end of the gamma search"),
    ("margin", "1e-3", "feasibility margin of the rate optimizer"),
    ("oracle_tol", "1e-10", "tolerance of the radial oracle"),
    ("grid_n", "64", "initial cells of the radial oracle"),
    ("trials", "4", "contraction probe trials"),
    ("seed", "7", "contraction probe seed"),
    ("output", "", "output path (stdout when empty)"),
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            c.set_assignment(line).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies one `key=value` override.
    pub fn set_assignment(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| invalid(format!("expected key=value, got '{assignment}'")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.iter().any(|(k, _, _)| *k == key) {
            return Err(invalid(format!("unknown configuration key '{key}'")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        if let Some(v) = self.values.get(key) {
            return v;
        }
        KEYS.iter()
            .find(|(k, _, _)| *k == key)
            .map(|(_, d, _)| *d)
            .unwrap_or("")
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let v = self.get(key);
        v.parse().map_err(|_| invalid(format!("{key}: '{v}' is not a number")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let v = self.get(key);
        v.parse()
            .map_err(|_| invalid(format!("{key}: '{v}' is not a nonnegative integer")))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            v => Err(invalid(format!("{key}: '{v}' is not a boolean"))),
        }
    }

    /// Comma-separated numbers; empty when the key is unset and has no
    /// default.
    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.get(key);
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| invalid(format!("{key}: '{s}' is not a number")))
            })
            .collect()
    }

    pub fn domain(&self) -> Result<DomainGeometry> {
        match self.get("domain") {
            "disk" => DomainGeometry::disk(self.f64("R")?),
            "ellipse" => DomainGeometry::ellipse(self.f64("a")?, self.f64("b")?),
            other => Err(invalid(format!("unknown domain '{other}'"))),
        }
    }

    pub fn coupling(&self) -> Result<CouplingParams> {
        CouplingParams::new(
            self.f64("beta")?,
            self.f64("c_coupling")?,
            self.f64("delta")?,
            self.f64("gamma_ball")?,
            self.f64("c_ball")?,
            self.f64("mu")?,
        )
    }

    pub fn solve_options(&self) -> Result<SolveOptions> {
        Ok(SolveOptions {
            mode: self.get("mode").parse::<IterationMode>()?,
            tol: self.f64("tol")?,
            max_iter: self.usize("max_iter")?,
            mu: self.f64("mu").unwrap_or(DEFAULT_MU),
            ..SolveOptions::default()
        })
    }

    /// The explicit schedule, or halving from 2 down to `epsilon`.
    pub fn schedule(&self) -> Result<Vec<f64>> {
        let s = self.list("schedule")?;
        if s.is_empty() {
            Ok(crate::solver::halving_schedule(2.0, self.f64("epsilon")?))
        } else {
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_defaults() {
        let c = Config::parse("# comment\nk = 3\n\nschedule=1, 0.5 ,0.25\ncoupled=true\n").unwrap();
        assert_eq!(c.f64("k").unwrap(), 3.0);
        assert_eq!(c.f64("epsilon").unwrap(), 0.25);
        assert_eq!(c.schedule().unwrap(), vec![1.0, 0.5, 0.25]);
        assert!(c.bool("coupled").unwrap());
        assert!(c.coupling().is_ok());
        assert_eq!(c.solve_options().unwrap().mode, IterationMode::Newton);
    }

    #[test]
    fn default_schedule_halves() {
        let mut c = Config::default();
        c.set("epsilon", "0.25").unwrap();
        assert_eq!(c.schedule().unwrap(), vec![2.0, 1.0, 0.5, 0.25]);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(Config::parse("k=2\nfoo=1"), Err(Error::Parse { line: 2, .. })));
        assert!(Config::parse("k 2").is_err());
        let c = Config::parse("k=two").unwrap();
        assert!(c.f64("k").is_err());
        let c = Config::parse("domain=square").unwrap();
        assert!(c.domain().is_err());
    }
}
