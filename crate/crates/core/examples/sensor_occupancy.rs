//! How often the true controllers see nothing, an object or a robot.

use turing_swarm::analysis::sensor_occupancy;
use turing_swarm::{Controller, ReactiveParams, WorldConfig};

fn main() -> turing_swarm::Result<()> {
    let trials = 100;
    let agg = sensor_occupancy(
        &WorldConfig::aggregation(),
        &Controller::Reactive(ReactiveParams::aggregation()),
        trials,
        1,
    )?;
    println!("aggregation: nothing {:.3}, robot {:.3}", agg[0], agg[1]);

    let clu = sensor_occupancy(
        &WorldConfig::clustering(),
        &Controller::Reactive(ReactiveParams::clustering()),
        trials,
        1,
    )?;
    println!("clustering: nothing {:.3}, object {:.3}, robot {:.3}", clu[0], clu[1], clu[2]);
    Ok(())
}
