use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use turing_swarm::config::ExperimentConfig;
use turing_swarm::runner::{self, AnalyzeOptions};
use turing_swarm::Error;

/// Worker threads used for trials; unset means one per core.
const THREADS_VAR: &str = "TURING_SWARM_THREADS";

#[derive(Parser)]
#[command(version, about = "Identify swarm behaviours by coevolving models and classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML file.
    Run {
        config: PathBuf,
        /// Overrides the configuration's output_dir.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Continue a run from one of its snapshots.
    Resume {
        snapshot: PathBuf,
        #[arg(long)]
        generations: usize,
        /// Reject the snapshot unless it was produced by this configuration.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run an experiment repeatedly with consecutive seeds.
    Batch {
        config: PathBuf,
        #[arg(long)]
        runs: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a finished run.
    Analyze {
        runlog: PathBuf,
        /// Post-evaluate the final classifiers on a grid with this many
        /// settings per parameter.
        #[arg(long, value_parser = ["5", "11"])]
        grid: Option<String>,
        #[arg(long)]
        dispersion: bool,
        #[arg(long)]
        occupancy: bool,
    },
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("{THREADS_VAR}: {e}")))
}

fn execute(command: Command) -> Result<(), Error> {
    configure_threads()?;
    match command {
        Command::Run { config, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summary = runner::run(&cfg, output.as_deref())?;
            println!("{} generations, best model mae {:.4}", summary.generations, summary.mae);
        }
        Command::Resume {
            snapshot,
            generations,
            config,
        } => {
            let expected = config.as_deref().map(ExperimentConfig::load).transpose()?;
            match runner::resume(&snapshot, generations, expected.as_ref())? {
                Some(summary) => println!("{} generations, best model mae {:.4}", summary.generations, summary.mae),
                None => println!("nothing to do"),
            }
        }
        Command::Batch { config, runs, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = output
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("batch"));
            let results = runner::batch(&cfg, runs, &dir)?;
            let failed: Vec<_> = results.iter().filter(|r| r.outcome.is_err()).collect();
            for r in &failed {
                if let Err(msg) = &r.outcome {
                    eprintln!("run {} (seed {}) failed: {msg}", r.index, r.seed);
                }
            }
            println!("{} of {} runs completed; tables in {}", results.len() - failed.len(), results.len(), dir.display());
            if !failed.is_empty() {
                return Err(Error::Runtime(format!("{} of {} runs failed", failed.len(), results.len())));
            }
        }
        Command::Analyze {
            runlog,
            grid,
            dispersion,
            occupancy,
        } => {
            let options = AnalyzeOptions {
                grid: grid.map(|g| g.parse().expect("validated by clap")),
                dispersion,
                occupancy,
            };
            for path in runner::analyze(&runlog, &options)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::SnapshotMismatch { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
