//! Compares how a group of agents and a group running a perturbed
//! controller aggregate over 400 s.

use turing_swarm::analysis::{final_dispersions, mann_whitney_u, swarm_series};
use turing_swarm::{Controller, ReactiveParams, WorldConfig};

fn main() -> turing_swarm::Result<()> {
    let left = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(-0.6);
    let world = WorldConfig {
        n_agents: 20,
        n_replicas: 0,
        init_square_side: (20.0f64 * 10_000.0).sqrt(),
        trial_duration: 400.0,
        ..WorldConfig::aggregation()
    };
    let truth = Controller::Reactive(ReactiveParams::aggregation());
    let other = Controller::Reactive(ReactiveParams::new(vec![left, -1.0, 1.0, -1.0])?);
    for (name, c) in [("truth", &truth), ("perturbed", &other)] {
        let series = swarm_series(&world, c, 1, 500)?;
        let row: Vec<String> = series.iter().map(|s| format!("{:.0}", s.dispersion)).collect();
        println!("{name:9} dispersion every 50 s: {}", row.join(" "));
    }
    let a = final_dispersions(&world, &truth, 30, 1)?;
    let b = final_dispersions(&world, &other, 30, 1)?;
    let mw = mann_whitney_u(&a, &b);
    println!("Mann-Whitney over 30 trials: U {}, p {:.4}", mw.u, mw.p_value);
    Ok(())
}
