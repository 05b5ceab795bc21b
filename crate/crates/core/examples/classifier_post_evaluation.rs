//! Scores the classifiers of a finished desk run against a grid of reactive
//! models they never met during coevolution.

use turing_swarm::analysis::{parameter_grid, post_evaluate_classifiers, PostEvaluation};
use turing_swarm::config::ExperimentConfig;
use turing_swarm::runner::POST_EVALUATION_TRIALS;
use turing_swarm::{Controller, ElmanNet, TuringLearning};

fn main() -> turing_swarm::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let settings = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let mut config = ExperimentConfig::load("presets/aggregation-desk.toml".as_ref())?;
    config.seed = seed;
    let setup = config.setup()?;
    let engine = TuringLearning {
        setup: setup.clone(),
        model_es: config.populations.model_es(),
        classifier_es: config.populations.classifier_es(),
    };
    let state = engine.run(config.generations, |_, _| {})?;

    let grid: Vec<Controller> = parameter_grid(settings, 2).into_iter().map(Controller::Reactive).collect();
    let nets: Vec<ElmanNet> = state
        .classifiers
        .members
        .iter()
        .map(|m| ElmanNet::classifier(m.genome.clone()))
        .collect::<Result<_, _>>()?;
    let eval = PostEvaluation {
        world: setup.world,
        agent: setup.agent,
        scaling: setup.scaling,
        seed,
        trials: POST_EVALUATION_TRIALS,
    };
    let scores = post_evaluate_classifiers(&nets, &grid, &eval)?;
    let subjective = state.classifiers.ranking()[0];
    for (i, s) in scores.iter().enumerate() {
        let mark = if i == subjective { " <- subjectively best" } else { "" };
        println!(
            "classifier {i:2}: accuracy {:.3} (models detected {:.3}, agents cleared {:.3}){mark}",
            s.accuracy(),
            s.models_detected,
            s.agents_cleared
        );
    }
    Ok(())
}
