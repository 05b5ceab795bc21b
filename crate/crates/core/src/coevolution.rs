//! Turing Learning: models and classifiers coevolve, each population under
//! its own (μ+λ) evolution strategy with self-adaptive mutation strengths.
//!
//! A model scores the fraction of classifiers that take its replica's motion
//! for an agent's; a classifier scores the mean of its specificity (genuine
//! samples accepted) and sensitivity (counterfeit samples rejected).

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{Controller, MorphReactiveParams, ReactiveParams};
use crate::classifier::{judge, ElmanNet, InputScaling, Judgment, Provenance, SpeedSample};
use crate::error::{Error, Result};
use crate::rng::{self, tag, Stream};
use crate::sim::{run_trial, BodyKind, WorldConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub fitness: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsParams {
    pub mu: usize,
    pub lambda: usize,
    #[serde(default = "default_sigma_init")]
    pub sigma_init: f64,
    #[serde(default = "default_sigma_floor")]
    pub sigma_floor: f64,
}

fn default_sigma_init() -> f64 {
    1.0
}

fn default_sigma_floor() -> f64 {
    1e-6
}

impl EsParams {
    pub fn new(mu: usize, lambda: usize) -> Self {
        EsParams {
            mu,
            lambda,
            sigma_init: default_sigma_init(),
            sigma_floor: default_sigma_floor(),
        }
    }

    pub fn size(&self) -> usize {
        self.mu + self.lambda
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.mu == 0 || self.lambda == 0 {
            return Err(Error::Config(format!("{name}: mu and lambda must both be positive")));
        }
        if !(self.sigma_init > 0.0) || !(self.sigma_floor > 0.0) {
            return Err(Error::Config(format!("{name}: mutation strengths must be positive")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub members: Vec<Individual>,
    pub mu: usize,
    pub lambda: usize,
}

impl Population {
    /// `mu + lambda` individuals with N(0, 1) genes and uniform strengths.
    pub fn random(genome_len: usize, params: &EsParams, rng: &mut Stream) -> Self {
        let members = (0..params.size())
            .map(|_| Individual {
                genome: (0..genome_len).map(|_| rng.sample(StandardNormal)).collect(),
                sigmas: vec![params.sigma_init; genome_len],
                fitness: None,
            })
            .collect();
        Population {
            members,
            mu: params.mu,
            lambda: params.lambda,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Indices ordered by decreasing fitness, ties by lower index.
    /// Unevaluated individuals rank last.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = self.members[a].fitness.unwrap_or(f64::NEG_INFINITY);
            let fb = self.members[b].fitness.unwrap_or(f64::NEG_INFINITY);
            fb.total_cmp(&fa)
        });
        order
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.ranking()[0]]
    }
}

/// One (μ+λ) generation step: keep the μ fittest, then append λ offspring,
/// each a mutated copy of a survivor chosen uniformly at random.
///
/// Strengths mutate log-normally with `τ' = 1/√(2L)` (shared draw) and
/// `τ = 1/√(2√L)` (per gene), then genes move by `σ' · N(0, 1)`.
pub fn es_step(pop: &Population, params: &EsParams, rng: &mut Stream) -> Population {
    let survivors: Vec<Individual> = pop
        .ranking()
        .into_iter()
        .take(params.mu)
        .map(|i| pop.members[i].clone())
        .collect();
    let mut members = survivors.clone();
    for _ in 0..params.lambda {
        let parent = &survivors[rng.random_range(0..survivors.len())];
        members.push(mutate(parent, params.sigma_floor, rng));
    }
    Population {
        members,
        mu: params.mu,
        lambda: params.lambda,
    }
}

fn mutate(parent: &Individual, sigma_floor: f64, rng: &mut Stream) -> Individual {
    let len = parent.genome.len().max(1) as f64;
    let tau_global = 1.0 / (2.0 * len).sqrt();
    let tau_gene = 1.0 / (2.0 * len.sqrt()).sqrt();
    let shared: f64 = rng.sample(StandardNormal);
    let mut genome = Vec::with_capacity(parent.genome.len());
    let mut sigmas = Vec::with_capacity(parent.sigmas.len());
    for (&gene, &sigma) in parent.genome.iter().zip(&parent.sigmas) {
        let own: f64 = rng.sample(StandardNormal);
        let sigma = (sigma * (tau_global * shared + tau_gene * own).exp()).max(sigma_floor);
        let step: f64 = rng.sample(StandardNormal);
        genome.push(gene + sigma * step);
        sigmas.push(sigma);
    }
    Individual {
        genome,
        sigmas,
        fitness: None,
    }
}

/// How candidate model genomes become controllers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpace {
    Reactive { sensor_states: usize },
    /// Reactive wheel speeds plus one field-of-view gene.
    MorphReactive { sensor_states: usize },
    Recurrent { hidden: usize },
}

impl ModelSpace {
    pub fn genome_len(&self) -> usize {
        match *self {
            ModelSpace::Reactive { sensor_states } => 2 * sensor_states,
            ModelSpace::MorphReactive { sensor_states } => 2 * sensor_states + 1,
            ModelSpace::Recurrent { hidden } => ElmanNet::parameter_count(1, hidden, 2),
        }
    }

    pub fn decode(&self, genome: &[f64]) -> Result<Controller> {
        if genome.len() != self.genome_len() {
            return Err(Error::LengthMismatch {
                expected: self.genome_len(),
                got: genome.len(),
            });
        }
        Ok(match *self {
            ModelSpace::Reactive { .. } => Controller::Reactive(ReactiveParams::new(genome.to_vec())?),
            ModelSpace::MorphReactive { .. } => {
                let (&fov_raw, rest) = genome.split_last().expect("non-empty");
                Controller::MorphReactive(MorphReactiveParams {
                    reactive: ReactiveParams::new(rest.to_vec())?,
                    fov_raw,
                })
            }
            ModelSpace::Recurrent { hidden } => Controller::Recurrent(ElmanNet::new(1, hidden, 2, genome.to_vec())?),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicaMode {
    /// Replicas run inside a group of agents.
    #[default]
    Mixed,
    /// Each model gets an all-agent trial and an all-replica trial.
    Separated,
}

/// Everything needed to turn a set of models into motion samples.
#[derive(Clone, Debug)]
pub struct Setup {
    pub world: WorldConfig,
    pub agent: Controller,
    pub model_space: ModelSpace,
    pub replica_mode: ReplicaMode,
    pub scaling: InputScaling,
    pub root_seed: u64,
}

impl Setup {
    pub fn validate(&self, n_models: usize) -> Result<()> {
        self.world.validate()?;
        let replicas = self.world.n_replicas;
        if replicas == 0 {
            return Err(Error::Config("at least one replica per trial is required".into()));
        }
        if self.replica_mode == ReplicaMode::Mixed && !n_models.is_multiple_of(replicas) {
            return Err(Error::Config(format!(
                "{n_models} models cannot be split into trials of {replicas} replicas"
            )));
        }
        if self.replica_mode == ReplicaMode::Mixed && self.world.n_agents == 0 {
            return Err(Error::Config("mixed trials need at least one agent".into()));
        }
        Ok(())
    }
}

/// Motion samples gathered for one generation.
#[derive(Clone, Debug)]
pub struct Observations {
    /// All agent samples, in trial order.
    pub genuine: Vec<SpeedSample>,
    /// One sample per model, indexed like the model population.
    pub counterfeit: Vec<SpeedSample>,
    /// For each model, indices into `genuine` of the agents observed
    /// alongside it.
    pub peers: Vec<Vec<usize>>,
}

fn samples_of(
    record: &crate::sim::TrialRecord,
    kind: BodyKind,
    provenance: Provenance,
    control_dt: f64,
) -> Result<Vec<SpeedSample>> {
    record
        .kinds
        .iter()
        .enumerate()
        .filter(|(_, k)| **k == kind)
        .map(|(body, _)| {
            Ok(SpeedSample {
                pairs: record.speeds(body, control_dt)?,
                provenance,
                individual: body,
            })
        })
        .collect()
}

/// Runs the trials of one generation.
///
/// Trial seeds depend only on the root seed, the generation and the trial
/// index, so results do not depend on how trials are scheduled.
pub fn observe(setup: &Setup, models: &[Controller], generation: usize) -> Result<Observations> {
    setup.validate(models.len())?;
    let world = &setup.world;
    let dt = world.control_dt;
    let g = generation as u64;
    match setup.replica_mode {
        ReplicaMode::Mixed => {
            let per_trial = world.n_replicas;
            let trials: Vec<(Vec<SpeedSample>, Vec<SpeedSample>)> = models
                .par_chunks(per_trial)
                .enumerate()
                .map(|(t, group)| {
                    let mut brains: Vec<Controller> = std::iter::repeat_n(setup.agent.clone(), world.n_agents)
                        .chain(group.iter().cloned())
                        .collect();
                    let record = run_trial(world, rng::stream(setup.root_seed, &[tag::TRIAL, g, t as u64]), &mut brains, true)?;
                    Ok((
                        samples_of(&record, BodyKind::Agent, Provenance::Genuine, dt)?,
                        samples_of(&record, BodyKind::Replica, Provenance::Counterfeit, dt)?,
                    ))
                })
                .collect::<Result<_>>()?;
            let mut obs = Observations {
                genuine: Vec::new(),
                counterfeit: Vec::new(),
                peers: Vec::new(),
            };
            for (agents, replicas) in trials {
                let start = obs.genuine.len();
                let peers: Vec<usize> = (start..start + agents.len()).collect();
                obs.genuine.extend(agents);
                for sample in replicas {
                    obs.peers.push(peers.clone());
                    obs.counterfeit.push(sample);
                }
            }
            Ok(obs)
        }
        ReplicaMode::Separated => {
            let group = world.n_robots();
            let agents_world = WorldConfig {
                n_agents: group,
                n_replicas: 0,
                ..world.clone()
            };
            let replicas_world = WorldConfig {
                n_agents: 0,
                n_replicas: group,
                ..world.clone()
            };
            let trials: Vec<(Vec<SpeedSample>, SpeedSample)> = models
                .par_iter()
                .enumerate()
                .map(|(j, model)| {
                    let j = j as u64;
                    let mut agents = vec![setup.agent.clone(); group];
                    let rec = run_trial(&agents_world, rng::stream(setup.root_seed, &[tag::TRIAL_AGENTS, g, j]), &mut agents, true)?;
                    let genuine = samples_of(&rec, BodyKind::Agent, Provenance::Genuine, dt)?;
                    let mut replicas = vec![model.clone(); group];
                    let rec = run_trial(&replicas_world, rng::stream(setup.root_seed, &[tag::TRIAL_REPLICAS, g, j]), &mut replicas, true)?;
                    let counterfeit = samples_of(&rec, BodyKind::Replica, Provenance::Counterfeit, dt)?
                        .into_iter()
                        .next()
                        .expect("group has at least one replica");
                    Ok((genuine, counterfeit))
                })
                .collect::<Result<_>>()?;
            let mut obs = Observations {
                genuine: Vec::new(),
                counterfeit: Vec::new(),
                peers: Vec::new(),
            };
            for (agents, replica) in trials {
                let start = obs.genuine.len();
                obs.peers.push((start..start + agents.len()).collect());
                obs.genuine.extend(agents);
                obs.counterfeit.push(replica);
            }
            Ok(obs)
        }
    }
}

/// Fitness values derived from a generation's judgments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessTable {
    /// `r_m(j)`: fraction of classifiers that mistook model `j` for an agent.
    pub model_fitness: Vec<f64>,
    pub classifier_fitness: Vec<f64>,
    pub specificity: Vec<f64>,
    pub sensitivity: Vec<f64>,
    /// Per model, how many classifiers it fooled.
    pub fooled_counts: Vec<usize>,
    /// Per classifier, how many counterfeit samples it rejected.
    pub rejected_counts: Vec<usize>,
}

/// Computes both populations' fitness.
///
/// `fooled[i][j]` is true when classifier `i` called model `j` an agent;
/// `accepted[i][k]` is true when classifier `i` called genuine sample `k` an
/// agent.
pub fn fitness_from_judgments(fooled: &[Vec<bool>], accepted: &[Vec<bool>]) -> FitnessTable {
    let n = fooled.len();
    let m = fooled.first().map_or(0, Vec::len);
    let fooled_counts: Vec<usize> = (0..m).map(|j| fooled.iter().filter(|row| row[j]).count()).collect();
    let model_fitness = fooled_counts.iter().map(|&c| c as f64 / n as f64).collect();
    let rejected_counts: Vec<usize> = fooled.iter().map(|row| row.iter().filter(|&&f| !f).count()).collect();
    let sensitivity: Vec<f64> = rejected_counts.iter().map(|&c| c as f64 / m as f64).collect();
    let specificity: Vec<f64> = accepted
        .iter()
        .map(|row| row.iter().filter(|&&a| a).count() as f64 / row.len() as f64)
        .collect();
    let classifier_fitness = specificity
        .iter()
        .zip(&sensitivity)
        .map(|(sp, se)| (sp + se) / 2.0)
        .collect();
    FitnessTable {
        model_fitness,
        classifier_fitness,
        specificity,
        sensitivity,
        fooled_counts,
        rejected_counts,
    }
}

/// Per-generation record of a Turing Learning run.
#[derive(Clone, Debug)]
pub struct GenerationRecord {
    pub generation: usize,
    pub fitness: FitnessTable,
    /// `fooled[i][j]`: classifier `i` judged model `j`'s sample an agent.
    pub fooled: Vec<Vec<bool>>,
    /// `accepted[i][k]`: classifier `i` judged genuine sample `k` an agent.
    pub accepted: Vec<Vec<bool>>,
    pub best_model_index: usize,
    pub best_model: Vec<f64>,
    pub best_classifier_index: usize,
}

impl GenerationRecord {
    pub fn best_model_fitness(&self) -> f64 {
        self.fitness.model_fitness[self.best_model_index]
    }

    pub fn best_classifier_fitness(&self) -> f64 {
        self.fitness.classifier_fitness[self.best_classifier_index]
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Runs one generation's trials, has every classifier judge every sample,
/// and writes the resulting fitness into both populations.
pub fn evaluate_generation(
    models: &mut Population,
    classifiers: &mut Population,
    setup: &Setup,
    generation: usize,
) -> Result<GenerationRecord> {
    let controllers: Vec<Controller> = models
        .members
        .iter()
        .map(|ind| setup.model_space.decode(&ind.genome))
        .collect::<Result<_>>()?;
    let obs = observe(setup, &controllers, generation)?;
    let scaling = setup.scaling;

    let judgments: Vec<(Vec<bool>, Vec<bool>)> = classifiers
        .members
        .par_iter()
        .map(|ind| {
            let mut net = ElmanNet::classifier(ind.genome.clone())?;
            let mut says_agent = |s: &SpeedSample| judge(&mut net, s, scaling).map(|j| j == Judgment::Agent);
            let fooled = obs.counterfeit.iter().map(&mut says_agent).collect::<Result<Vec<_>>>()?;
            let accepted = obs.genuine.iter().map(&mut says_agent).collect::<Result<Vec<_>>>()?;
            Ok((fooled, accepted))
        })
        .collect::<Result<_>>()?;
    let (fooled, accepted): (Vec<_>, Vec<_>) = judgments.into_iter().unzip();

    let fitness = fitness_from_judgments(&fooled, &accepted);
    for (ind, f) in models.members.iter_mut().zip(&fitness.model_fitness) {
        ind.fitness = Some(*f);
    }
    for (ind, f) in classifiers.members.iter_mut().zip(&fitness.classifier_fitness) {
        ind.fitness = Some(*f);
    }
    let best_model_index = argmax(&fitness.model_fitness);
    let best_classifier_index = argmax(&fitness.classifier_fitness);
    Ok(GenerationRecord {
        generation,
        best_model: models.members[best_model_index].genome.clone(),
        best_model_index,
        best_classifier_index,
        fitness,
        fooled,
        accepted,
    })
}

/// Both populations after `generation` completed generations. Members carry
/// the fitness of the last evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunState {
    pub generation: usize,
    pub models: Population,
    pub classifiers: Population,
}

/// Classifier weight count.
pub const CLASSIFIER_GENOME_LEN: usize = 46;

#[derive(Clone, Debug)]
pub struct TuringLearning {
    pub setup: Setup,
    pub model_es: EsParams,
    pub classifier_es: EsParams,
}

impl TuringLearning {
    pub fn initial_state(&self) -> RunState {
        let root = self.setup.root_seed;
        let models = Population::random(
            self.setup.model_space.genome_len(),
            &self.model_es,
            &mut rng::stream(root, &[tag::INIT_MODELS]),
        );
        let classifiers = Population::random(
            CLASSIFIER_GENOME_LEN,
            &self.classifier_es,
            &mut rng::stream(root, &[tag::INIT_CLASSIFIERS]),
        );
        RunState {
            generation: 0,
            models,
            classifiers,
        }
    }

    /// Runs the next generation: variation (from the second generation on)
    /// followed by evaluation.
    pub fn advance(&self, state: &mut RunState) -> Result<GenerationRecord> {
        let g = state.generation;
        let root = self.setup.root_seed;
        if g > 0 {
            state.models = es_step(&state.models, &self.model_es, &mut rng::stream(root, &[tag::ES_MODELS, g as u64]));
            state.classifiers = es_step(
                &state.classifiers,
                &self.classifier_es,
                &mut rng::stream(root, &[tag::ES_CLASSIFIERS, g as u64]),
            );
        }
        let record = evaluate_generation(&mut state.models, &mut state.classifiers, &self.setup, g)?;
        state.generation += 1;
        Ok(record)
    }

    /// Runs `generations` generations from scratch, handing every record to
    /// `observer`.
    pub fn run(
        &self,
        generations: usize,
        mut observer: impl FnMut(&GenerationRecord, &RunState),
    ) -> Result<RunState> {
        let mut state = self.initial_state();
        for _ in 0..generations {
            let record = self.advance(&mut state)?;
            observer(&record, &state);
        }
        Ok(state)
    }
}
