//! Convergence studies and their tables.
//!
//! Every study is deterministic: rows follow the input order and all
//! numbers are written with shortest round-trip formatting, so rerunning a
//! study with the same inputs reproduces its CSV byte for byte.

mod eoc;
mod studies;
mod table;

pub use eoc::{eoc, fit_slope, SlopeFit};
pub use studies::{
    coupled_study, epsilon_study, h_study, interpolation_study, linear_regime_study, probe_study, rates_table,
    ProbeStudyParams, StudyResult,
};
pub use table::Table;
