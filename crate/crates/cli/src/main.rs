use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kps_cli::{CliError, CommandOutput, ExperimentConfig};
use kps_core::sim::Population;

#[derive(Parser)]
#[command(
    name = "kps",
    version,
    about = "Multiple block code key pre-distribution experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    population: Option<PopulationArg>,
    #[arg(long, global = true)]
    trials: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PopulationArg {
    CodeSpace,
    Deployed,
}

#[derive(Subcommand)]
enum Command {
    /// Build a deployment and write its export.
    Assign,
    /// Common key references of two nodes of a deployment file.
    Discover {
        node_a: usize,
        node_b: usize,
        /// Deployment file; overrides the config's `deployment`.
        #[arg(long)]
        deployment: Option<PathBuf>,
    },
    /// Analytical resilience report.
    Analyze,
    /// Monte Carlo resilience estimates.
    Simulate,
    /// Resilience against the number of colluders.
    SweepR,
    /// Resilience for (code, M) variants with their storage cost.
    SweepStorage,
    /// Per-node storage in bits.
    Storage,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(p) = cli.population {
        cfg.population = match p {
            PopulationArg::CodeSpace => Population::CodeSpace,
            PopulationArg::Deployed => Population::Deployed,
        };
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }

    let output: CommandOutput = match cli.command {
        Command::Assign => kps_cli::cmd_assign(&cfg)?,
        Command::Discover {
            node_a,
            node_b,
            deployment,
        } => {
            if deployment.is_some() {
                cfg.deployment = deployment;
            }
            kps_cli::cmd_discover(&cfg, node_a, node_b)?
        }
        Command::Analyze => kps_cli::cmd_analyze(&cfg)?,
        Command::Simulate => kps_cli::cmd_simulate(&cfg)?,
        Command::SweepR => kps_cli::cmd_sweep_r(&cfg)?,
        Command::SweepStorage => kps_cli::cmd_sweep_storage(&cfg)?,
        Command::Storage => kps_cli::cmd_storage(&cfg)?,
    };

    if let Some(note) = &output.note {
        eprintln!("{note}");
    }
    match &cfg.out {
        Some(path) => std::fs::write(path, &output.body).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kps: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
