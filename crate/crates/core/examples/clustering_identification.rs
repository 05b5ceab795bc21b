//! Identifies the object-clustering controller with its three-state sensor.

use turing_swarm::config::ExperimentConfig;
use turing_swarm::runner;

fn main() -> turing_swarm::Result<()> {
    let mut config = ExperimentConfig::load("presets/clustering-desk.toml".as_ref())?;
    if let Some(g) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        config.generations = g;
    }
    let summary = runner::run(&config, None)?;
    println!("executed {:.3?}", summary.executed);
    println!("truth    {:?}", summary.truth);
    println!("per-parameter error {:.3?}", summary.ae);
    Ok(())
}
