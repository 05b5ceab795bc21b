//! Identifies controllers drawn at random instead of a known behaviour.

use turing_swarm::config::ExperimentConfig;
use turing_swarm::runner;

fn main() -> turing_swarm::Result<()> {
    let controllers: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut config = ExperimentConfig::load("presets/random-desk.toml".as_ref())?;
    for k in 1..=controllers {
        config.study.controller_seed = Some(k);
        config.output_dir = Some(format!("runs/random-desk-{k}").into());
        let summary = runner::run(&config, None)?;
        println!("controller {k}: truth {:.3?}", summary.truth);
        println!("              model {:.3?}  mae {:.4}", summary.executed, summary.mae);
    }
    Ok(())
}
