//! Fits the aggregation controller by least squares on motion and shows the
//! left-wheel parameters collapsing onto their occupancy-weighted mean.

use turing_swarm::baseline::MetricBaseline;
use turing_swarm::{Controller, EsParams, InputScaling, ModelSpace, ReactiveParams, ReplicaMode, Setup, WorldConfig};

fn main() -> turing_swarm::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let generations = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(200);
    let baseline = MetricBaseline {
        setup: Setup {
            world: WorldConfig::aggregation(),
            agent: Controller::Reactive(ReactiveParams::aggregation()),
            model_space: ModelSpace::Reactive { sensor_states: 2 },
            replica_mode: ReplicaMode::Mixed,
            scaling: InputScaling::default(),
            root_seed: seed,
        },
        model_es: EsParams::new(10, 10),
    };
    baseline.run(generations, |record, _| {
        if record.generation % 20 == 0 || record.generation + 1 == generations {
            let p: Vec<String> = record.best_model.iter().map(|v| format!("{v:+.3}")).collect();
            println!("gen {:4}  -e_m {:10.1}  model [{}]", record.generation, record.best_fitness(), p.join(", "));
        }
    })?;
    println!("weighted mean of the left wheel: {:.4}", -0.7 * 0.912 + 1.0 * 0.088);
    Ok(())
}
