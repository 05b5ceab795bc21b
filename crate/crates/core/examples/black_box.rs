//! Identifies aggregation with recurrent models that know nothing about
//! the controller's structure, then reads off their steady-state outputs.

use turing_swarm::analysis::recurrent_steady_state;
use turing_swarm::config::ExperimentConfig;
use turing_swarm::runner::STEADY_STATE_STEPS;
use turing_swarm::{ElmanNet, TuringLearning, AGGREGATION_TRUTH};

fn main() -> turing_swarm::Result<()> {
    let hidden: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let seed = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut config = ExperimentConfig::load(format!("presets/black-box-h{hidden}-desk.toml").as_ref())?;
    config.seed = seed;
    let engine = TuringLearning {
        setup: config.setup()?,
        model_es: config.populations.model_es(),
        classifier_es: config.populations.classifier_es(),
    };
    let state = engine.run(config.generations, |_, _| {})?;
    let net = ElmanNet::new(1, hidden, 2, state.models.best().genome.clone())?;
    let steady = recurrent_steady_state(&net, 2, STEADY_STATE_STEPS);
    println!("truth        {AGGREGATION_TRUTH:?}");
    println!("steady state {:?}", steady.outputs.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());
    println!("change over the last step {:.2e}", steady.last_change);
    Ok(())
}
