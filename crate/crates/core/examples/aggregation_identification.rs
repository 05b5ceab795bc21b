//! Identifies the aggregation controller with Turing Learning at desk scale
//! and prints how the best model approaches the truth.

use turing_swarm::analysis::model_error;
use turing_swarm::{
    Controller, EsParams, InputScaling, ModelSpace, ReactiveParams, ReplicaMode, Setup, TuringLearning, WorldConfig,
    AGGREGATION_TRUTH,
};

fn main() -> turing_swarm::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let generations = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(200);
    let engine = TuringLearning {
        setup: Setup {
            world: WorldConfig::aggregation(),
            agent: Controller::Reactive(ReactiveParams::aggregation()),
            model_space: ModelSpace::Reactive { sensor_states: 2 },
            replica_mode: ReplicaMode::Mixed,
            scaling: InputScaling::default(),
            root_seed: seed,
        },
        model_es: EsParams::new(10, 10),
        classifier_es: EsParams::new(10, 10),
    };
    engine.run(generations, |record, _| {
        if record.generation % 20 == 0 || record.generation + 1 == generations {
            let err = model_error(&record.best_model, &AGGREGATION_TRUTH).expect("same length");
            let p: Vec<String> = record.best_model.iter().map(|v| format!("{v:+.3}")).collect();
            println!(
                "gen {:4}  r_m {:.2}  r_c {:.2}  model [{}]  mae {:.3}",
                record.generation,
                record.best_model_fitness(),
                record.best_classifier_fitness(),
                p.join(", "),
                err.mae
            );
        }
    })?;
    Ok(())
}
