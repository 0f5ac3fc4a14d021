//! Configuration-driven experiment runner for the floq toolkit.
//!
//! One experiment per invocation; outputs are deterministic for a given
//! config and seed (bench timing excluded). Exit codes: 0 success,
//! 2 config error, 3 physics/convergence error.

mod config;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigFile, ExperimentKind};

#[derive(Parser)]
#[command(name = "floq", version, about = "Two-tone Floquet qubit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Output directory (default: directory named in the config, or
        /// "out-<experiment>").
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Seed for synthetic-test generators.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Time a quasiphase scan per numerator.
    Bench {
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and validate a config, printing the resolved form.
    Validate { config: PathBuf },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_PHYSICS: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match ConfigFile::load(&config) {
            Ok(cfg) => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&cfg.resolved_json()).expect("json")
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Run {
            config,
            out_dir,
            workers,
            seed,
        } => execute(&config, out_dir, workers, seed, None),
        Command::Bench {
            config,
            out_dir,
            workers,
            seed,
        } => execute(
            &config,
            out_dir,
            workers,
            seed,
            Some(ExperimentKind::SolverBench),
        ),
    }
}

fn execute(
    config_path: &std::path::Path,
    out_dir: Option<PathBuf>,
    workers: usize,
    seed: Option<u64>,
    force_experiment: Option<ExperimentKind>,
) -> ExitCode {
    let mut cfg = match ConfigFile::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(exp) = force_experiment {
        cfg.experiment = exp;
        if let Err(e) = cfg.validate() {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    if workers > 0 {
        cfg.workers = workers;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if cfg.workers > 0 {
        // worker count must not change results; reductions are ordered
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build_global()
        {
            eprintln!("worker pool: {e}");
        }
    }
    let dir = out_dir
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(format!("out-{}", cfg.experiment.as_str())));

    match experiments::run(&cfg, &dir) {
        Ok(()) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("experiment failed: {e:#}");
            ExitCode::from(EXIT_PHYSICS)
        }
    }
}
