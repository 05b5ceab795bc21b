//! Infers the sensor's field of view together with the controller.

use turing_swarm::config::ExperimentConfig;
use turing_swarm::runner;

fn main() -> turing_swarm::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "presets/fov-desk.toml".into());
    let config = ExperimentConfig::load(path.as_ref())?;
    let summary = runner::run(&config, None)?;
    let (fov, wheels) = summary.executed.split_last().expect("morphology genome");
    let (true_fov, true_wheels) = summary.truth.split_last().expect("morphology truth");
    println!("wheels {wheels:.3?} (truth {true_wheels:?})");
    println!("field of view {:.1} deg (truth {:.1} deg)", fov.to_degrees(), true_fov.to_degrees());
    println!("mae {:.4}", summary.mae);
    Ok(())
}
