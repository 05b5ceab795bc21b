//! Writes the poses of one aggregation trial as CSV on stdout.

use turing_swarm::rng::{self, tag};
use turing_swarm::sim::{run_trial, write_trajectory_rows, TRAJECTORY_HEADER};
use turing_swarm::{Controller, ReactiveParams, WorldConfig};

fn main() -> turing_swarm::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let world = WorldConfig::aggregation();
    let mut brains = vec![Controller::Reactive(ReactiveParams::aggregation()); world.n_robots()];
    let record = run_trial(&world, rng::stream(seed, &[tag::TRIAL, 0]), &mut brains, true)?;
    let mut out = format!("{TRAJECTORY_HEADER}\n");
    write_trajectory_rows(&mut out, 0, &record);
    print!("{out}");
    Ok(())
}
