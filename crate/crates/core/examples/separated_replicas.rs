//! Identification when replicas never share a trial with agents.

use turing_swarm::config::ExperimentConfig;
use turing_swarm::runner;

fn main() -> turing_swarm::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "presets/separated-desk.toml".into());
    let config = ExperimentConfig::load(path.as_ref())?;
    let summary = runner::run(&config, None)?;
    println!("executed {:.3?}", summary.executed);
    println!("truth    {:?}", summary.truth);
    println!("mae {:.4}", summary.mae);
    Ok(())
}
