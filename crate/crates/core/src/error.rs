use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot mesh domain: {0}")]
    Mesh(String),

    #[error("point ({0}, {1}) lies outside the mesh")]
    PointOutside(f64, f64),

    #[error("function does not vanish on the discrete boundary (dof {dof} has value {value:e})")]
    NotInVh { dof: usize, value: f64 },

    #[error("linear solve failed: {reason} (condition estimate {condition:e})")]
    LinearSolve { reason: String, condition: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("iteration diverged at step {iteration} (residual {residual:e}, best {best:e})")]
    Divergence { iteration: usize, residual: f64, best: f64 },

    #[error("continuation stage {stage} (eps = {epsilon}) failed: {source}")]
    Stage {
        stage: usize,
        epsilon: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("infeasible rate constraints: {0}")]
    Infeasible(String),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
