//! Command-line front end: runs solves and convergence studies from a
//! `key = value` configuration and writes CSV.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use pmcf_core::config::{Config, KEYS};
use pmcf_core::experiments::{
    coupled_study, epsilon_study, h_study, probe_study, rates_table, ProbeStudyParams, StudyResult, Table,
};
use pmcf_core::fe::{write_function, P2Space};
use pmcf_core::geometry::build_mesh;
use pmcf_core::operators::RegParams;
use pmcf_core::oracle::radial_regularized_solve;
use pmcf_core::solver::{continuation_solve, MeshPlan, REPORT_COLUMNS};
use pmcf_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "pmcf",
    version,
    about = "Regularized power mean curvature flow on planar domains"
)]
struct Cli {
    /// Print the CSV columns of every subcommand and the configuration keys.
    #[arg(long)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
struct Common {
    /// Configuration file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override one configuration entry; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// CSV destination (overrides the `output` key; stdout by default).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Continuation solve; one report row per stage.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Also save the final discrete solution.
        #[arg(long)]
        save_function: Option<PathBuf>,
    },
    /// Regularization error of the radial profile over `eps_list`.
    ConvergeEps(Common),
    /// Discretization error at fixed `epsilon` over `h_list`.
    ConvergeH(Common),
    /// Total error with coupled `h = c_coupling eps^beta` over `schedule`.
    ConvergeCoupled(Common),
    /// Rate exponents and Holder rates for `thetas`.
    Rates(Common),
    /// Radial reference profile `r, v` at `epsilon`.
    Oracle(Common),
    /// Frozen-map contraction ratios over `h_list`.
    Probe(Common),
}

fn load(common: &Common) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    for o in &common.overrides {
        cfg.set_assignment(o)?;
    }
    Ok(cfg)
}

fn sink(common: &Common, cfg: &Config) -> Result<Box<dyn Write>> {
    let path = common.output.clone().or_else(|| {
        let p = cfg.get("output");
        (!p.is_empty()).then(|| PathBuf::from(p))
    });
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_table(common: &Common, cfg: &Config, table: &Table) -> Result<()> {
    let mut out = sink(common, cfg)?;
    table.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn summarize(study: &StudyResult) {
    for (name, fit) in &study.slopes {
        eprintln!("slope {name}: {:.4} (fit residual {:.2e})", fit.slope, fit.residual);
    }
    for (name, orders) in &study.eocs {
        let s: Vec<String> = orders.iter().map(|v| format!("{v:.3}")).collect();
        eprintln!("eoc {name}: {}", s.join(" "));
    }
}

fn radius(cfg: &Config) -> Result<f64> {
    if cfg.get("domain") != "disk" {
        return Err(Error::InvalidParameter("convergence studies need domain = disk".into()));
    }
    cfg.f64("R")
}

fn schema() {
    let tables: [(&str, &[&str]); 7] = [
        ("solve", &REPORT_COLUMNS),
        (
            "converge-eps",
            &["epsilon", "c0_error", "holder_seminorm", "holder_error"],
        ),
        (
            "converge-h",
            &[
                "h_target",
                "h",
                "dofs",
                "iterations",
                "final_residual",
                "c0_nodal_error",
                "c0_error",
                "h1mu_error",
            ],
        ),
        (
            "converge-coupled",
            &[
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
            ],
        ),
        (
            "rates",
            &[
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
            ],
        ),
        ("oracle", &["r", "v"]),
        ("probe", &["h_target", "h", "sigma", "max_ratio", "mean_ratio"]),
    ];
    println!("# CSV columns");
    for (cmd, cols) in tables {
        println!("{cmd}: {}", cols.join(","));
    }
    println!("\n# configuration keys (default)");
    for (k, d, doc) in KEYS {
        println!("{k} = {d}    # {doc}");
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Solve { common, save_function } => {
            let cfg = load(&common)?;
            let k = cfg.f64("k")?;
            let opts = cfg.solve_options()?;
            let domain = cfg.domain()?;
            let schedule = cfg.schedule()?;
            let plan = if cfg.bool("coupled")? {
                MeshPlan::Coupled {
                    domain,
                    params: cfg.coupling()?,
                }
            } else {
                let mesh = build_mesh(&domain, cfg.f64("mesh.h")?)?;
                MeshPlan::Fixed(P2Space::new(Arc::new(mesh)))
            };
            let res = continuation_solve(&plan, k, &schedule, &opts, None)?;
            let mut out = csv::Writer::from_writer(sink(&common, &cfg)?);
            out.write_record(REPORT_COLUMNS)?;
            for rep in &res.reports {
                out.write_record(rep.csv_row())?;
            }
            out.flush()?;
            if let Some(p) = save_function {
                write_function(res.solution(), BufWriter::new(File::create(p)?))?;
            }
        }
        Command::ConvergeEps(common) => {
            let cfg = load(&common)?;
            let study = epsilon_study(
                cfg.f64("k")?,
                radius(&cfg)?,
                cfg.f64("theta")?,
                &cfg.list("eps_list")?,
                cfg.f64("oracle_tol")?,
            )?;
            summarize(&study);
            write_table(&common, &cfg, &study.table)?;
        }
        Command::ConvergeH(common) => {
            let cfg = load(&common)?;
            let study = h_study(
                cfg.f64("k")?,
                radius(&cfg)?,
                cfg.f64("epsilon")?,
                &cfg.list("h_list")?,
                cfg.f64("oracle_tol")?,
                cfg.f64("mu")?,
                &cfg.solve_options()?,
            )?;
            summarize(&study);
            write_table(&common, &cfg, &study.table)?;
        }
        Command::ConvergeCoupled(common) => {
            let cfg = load(&common)?;
            let mut schedule = cfg.list("schedule")?;
            if schedule.is_empty() {
                schedule = vec![0.4, 0.2, 0.1];
            }
            let study = coupled_study(
                cfg.f64("k")?,
                radius(&cfg)?,
                cfg.f64("theta")?,
                &cfg.coupling()?,
                &schedule,
                cfg.f64("oracle_tol")?,
                &cfg.solve_options()?,
            )?;
            summarize(&study);
            write_table(&common, &cfg, &study.table)?;
        }
        Command::Rates(common) => {
            let cfg = load(&common)?;
            let (re, table) = rates_table(
                cfg.f64("k")?,
                cfg.f64("gamma_max")?,
                cfg.f64("margin")?,
                &cfg.list("thetas")?,
            )?;
            if re.at_gamma_max {
                eprintln!("maximizer at gamma_max: the objective is a truncated supremum");
            }
            write_table(&common, &cfg, &table)?;
        }
        Command::Oracle(common) => {
            let cfg = load(&common)?;
            let rp = RegParams::new(cfg.f64("epsilon")?, cfg.f64("k")?)?;
            let prof = radial_regularized_solve(&rp, radius(&cfg)?, cfg.usize("grid_n")?, cfg.f64("oracle_tol")?)?;
            eprintln!(
                "cells {}, error estimate {:.2e}",
                prof.radii().len() - 1,
                prof.error_estimate()
            );
            let mut out = sink(&common, &cfg)?;
            prof.write_csv(&mut out)?;
            out.flush()?;
        }
        Command::Probe(common) => {
            let cfg = load(&common)?;
            let params = ProbeStudyParams {
                k: cfg.f64("k")?,
                radius: radius(&cfg)?,
                epsilon: cfg.f64("epsilon")?,
                h_list: cfg.list("h_list")?,
                coupling: cfg.coupling()?,
                trials: cfg.usize("trials")?,
                seed: cfg.usize("seed")? as u64,
            };
            let study = probe_study(&params, &cfg.solve_options()?)?;
            summarize(&study);
            write_table(&common, &cfg, &study.table)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.schema {
        schema();
        return ExitCode::SUCCESS;
    }
    let Some(cmd) = cli.command else {
        eprintln!("no subcommand given; see --help");
        return ExitCode::from(2);
    };
    match run(cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
