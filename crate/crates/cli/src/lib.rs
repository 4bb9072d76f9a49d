//! Library side of the `radflow` command: the acceptance suite, the report
//! envelope and the subcommand implementations.

pub mod acceptance;
pub mod commands;
pub mod report;

use std::path::Path;

use clap::Parser;

use commands::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Expr(#[from] radflow::expr::ExprError),
    #[error(transparent)]
    Model(#[from] radflow::model::ModelError),
    #[error(transparent)]
    Symmetry(#[from] radflow::symmetry::SymmetryError),
    #[error(transparent)]
    Solver(#[from] radflow::solver::SolverError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Runs one invocation and returns its exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    if let Command::Reference = cli.command {
        return match report::write_stdout(&commands::reference()) {
            Ok(()) => EXIT_PASS,
            Err(_) => EXIT_CONFIG,
        };
    }
    match dispatch(&cli).and_then(|r| r.emit(cli.report.as_deref()).map(|_| r.pass)) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn dispatch(cli: &Cli) -> Result<report::Report, CliError> {
    use commands::*;
    let seed = cli.seed;
    match &cli.command {
        Command::VerifySymmetries { case, eos } => verify_symmetries(seed, *case, eos.as_deref()),
        Command::CasimirCheck { order, f, budget } => casimir_check(seed, *order, f.as_deref(), *budget),
        Command::HamSymmetry { density, eos } => ham_symmetry(seed, density, eos),
        Command::AdvectedCheck { branch, order, flow, grid, tol, csv } => {
            advected_check(seed, *branch, *order, &load_config(flow, grid)?, *tol, csv.as_deref())
        }
        Command::Simulate { config, grid, out, snapshots, emit_plot_data, mass_tol } => simulate(
            seed,
            &load_config(config, grid)?,
            out,
            *snapshots,
            *emit_plot_data,
            *mass_tol,
        ),
        Command::ConserveReport { config, grid, levels, balances, min_order } => {
            conserve_report(seed, &load_config(config, grid)?, *levels, balances, *min_order)
        }
        Command::TransformSolution { config, grid, group, eps, q, max_ratio, out, at } => transform_solution(
            seed,
            &load_config(config, grid)?,
            group,
            *eps,
            *q,
            *max_ratio,
            out.as_deref(),
            *at,
        ),
        Command::Selftest => selftest(seed),
        Command::Reference => unreachable!("handled before dispatch"),
    }
}
