//! `qem` — batch driver for the noisy-simulator mitigation experiments.
//!
//! Verbs: `run-vqe`, `mitigate`, `sweep`, `histogram`, `zne`, `scaling`.
//! All verbs are driven by one JSON configuration document (see
//! `configs/`), write machine-readable CSV/JSON into the output directory,
//! and are fully deterministic for a fixed master seed.
//!
//! Exit codes: 0 success, 2 configuration or parse error, 3 numerical
//! failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::commands::SweepGrid;
use crate::config::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "qem",
    version,
    about = "Noisy-circuit simulation with moment-based energy-error mitigation",
    arg_required_else_help = true
)]
struct Cli {
    /// Experiment configuration document (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Infinite-shot mode: replace every shot budget with the exact limit.
    #[arg(long, global = true)]
    exact: bool,
    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the ansatz and persist θ_opt with its optimizer trace.
    RunVqe,
    /// Apply every configured estimator to a stored optimal circuit.
    Mitigate {
        /// θ_opt record (or bare JSON array) to mitigate.
        #[arg(long, value_name = "PATH")]
        theta: PathBuf,
    },
    /// Re-optimize and estimate across a J′/J grid or a file list.
    Sweep {
        /// Lower end of the J′/J grid.
        #[arg(long, default_value_t = 0.6)]
        from: f64,
        /// Upper end of the J′/J grid.
        #[arg(long, default_value_t = 1.4)]
        to: f64,
        /// Number of grid points.
        #[arg(long, default_value_t = 9)]
        points: usize,
        /// Sweep these operator files instead of a coupling grid.
        #[arg(long, num_args = 1.., value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Repeat measurement and mitigation of one optimal circuit.
    Histogram {
        /// Stored θ_opt; omitted → optimize first.
        #[arg(long, value_name = "PATH")]
        theta: Option<PathBuf>,
    },
    /// Fold CZ layers, extrapolate to zero noise, and compare budgets.
    Zne {
        /// Stored θ_opt; omitted → optimize first.
        #[arg(long, value_name = "PATH")]
        theta: Option<PathBuf>,
    },
    /// Term-count scaling report over operator files (no config needed).
    Scaling {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
        /// Highest operator power to count.
        #[arg(long, default_value_t = 3)]
        max_power: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 3 for breached numerical invariants, 2 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if matches!(cause.downcast_ref::<qem_core::Error>(), Some(qem_core::Error::Numerical(_))) {
            return 3;
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    if let Command::Scaling { files, max_power } = &cli.command {
        let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
        return commands::scaling(files, *max_power, cli.seed.unwrap_or(0), &out);
    }

    let path = cli
        .config
        .as_deref()
        .context("--config PATH is required for this command")?;
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply_overrides(cli.seed, cli.out.clone(), cli.exact);
    cfg.validate()
        .with_context(|| format!("invalid config {}", path.display()))?;

    match &cli.command {
        Command::RunVqe => commands::run_vqe(&cfg),
        Command::Mitigate { theta } => commands::mitigate(&cfg, theta),
        Command::Sweep { from, to, points, files } => {
            let grid = if files.is_empty() {
                SweepGrid::Ratio { from: *from, to: *to, points: *points }
            } else {
                SweepGrid::Files(files.clone())
            };
            commands::sweep(&cfg, &grid)
        }
        Command::Histogram { theta } => commands::histogram(&cfg, theta.as_deref()),
        Command::Zne { theta } => commands::zne(&cfg, theta.as_deref()),
        Command::Scaling { .. } => unreachable!("handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_failures_map_to_3_everything_else_to_2() {
        let numerical = anyhow::Error::from(qem_core::Error::Numerical("singular".into()))
            .context("while extrapolating");
        assert_eq!(exit_code(&numerical), 3);

        let parse = anyhow::Error::from(qem_core::Error::Parse("bad json".into()));
        assert_eq!(exit_code(&parse), 2);

        let plain = anyhow::anyhow!("config missing");
        assert_eq!(exit_code(&plain), 2);
    }

    #[test]
    fn cli_parses_every_verb() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
