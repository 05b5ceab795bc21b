//! Experiment configuration files.
//!
//! A configuration is a TOML document:
//!
//! ```toml
//! case_study = "aggregation"      # clustering, random_reactive, fov_morphology, black_box_model
//! engine = "turing_learning"      # or metric_baseline
//! replica_mode = "mixed"          # or separated
//! generations = 200
//! seed = 7
//! snapshot_every = 50
//! output_dir = "runs/aggregation-desk"
//!
//! [populations]
//! model_mu = 10
//! model_lambda = 10
//! classifier_mu = 10
//! classifier_lambda = 10
//!
//! [study]
//! hidden = 1                      # black_box_model only
//!
//! [world]                         # any WorldConfig field
//! trial_duration = 10.0
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::behavior::{fov_angle, random_reactive, Controller, ReactiveParams};
use crate::classifier::InputScaling;
use crate::coevolution::{EsParams, ModelSpace, ReplicaMode, Setup};
use crate::error::{Error, Result};
use crate::sim::WorldConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStudy {
    Aggregation,
    Clustering,
    /// Aggregation setup, agents driven by a random reactive controller.
    RandomReactive,
    /// Aggregation setup where the sensor's field of view is inferred too.
    FovMorphology,
    /// Aggregation agents identified with recurrent network models.
    BlackBoxModel,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    TuringLearning,
    MetricBaseline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Populations {
    #[serde(default = "default_half")]
    pub model_mu: usize,
    #[serde(default = "default_half")]
    pub model_lambda: usize,
    #[serde(default = "default_half")]
    pub classifier_mu: usize,
    #[serde(default = "default_half")]
    pub classifier_lambda: usize,
    #[serde(default = "default_sigma_init")]
    pub sigma_init: f64,
    #[serde(default = "default_sigma_floor")]
    pub sigma_floor: f64,
}

fn default_half() -> usize {
    50
}

fn default_sigma_init() -> f64 {
    1.0
}

fn default_sigma_floor() -> f64 {
    1e-6
}

impl Default for Populations {
    fn default() -> Self {
        Populations {
            model_mu: 50,
            model_lambda: 50,
            classifier_mu: 50,
            classifier_lambda: 50,
            sigma_init: default_sigma_init(),
            sigma_floor: default_sigma_floor(),
        }
    }
}

impl Populations {
    pub fn model_es(&self) -> EsParams {
        EsParams {
            sigma_init: self.sigma_init,
            sigma_floor: self.sigma_floor,
            ..EsParams::new(self.model_mu, self.model_lambda)
        }
    }

    pub fn classifier_es(&self) -> EsParams {
        EsParams {
            sigma_init: self.sigma_init,
            sigma_floor: self.sigma_floor,
            ..EsParams::new(self.classifier_mu, self.classifier_lambda)
        }
    }
}

/// Settings that only some case studies use.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyOptions {
    /// Hidden units of recurrent models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    /// Field of view of the agents' sensor, in radians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_fov: Option<f64>,
    /// Replaces the case study's agent controller.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_params: Option<Vec<f64>>,
    /// Seed of the random agent controller; defaults to the run seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controller_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub case_study: CaseStudy,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub replica_mode: ReplicaMode,
    pub generations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub populations: Populations,
    #[serde(default)]
    pub study: StudyOptions,
    /// Overrides of the case study's world, keyed by field name.
    #[serde(default, skip_serializing_if = "toml::Table::is_empty")]
    pub world: toml::Table,
}

fn default_snapshot_every() -> usize {
    50
}

/// 1-based line of the first assignment to `key`, for error messages.
fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|line| {
        let line = line.trim_start();
        line.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        config.validate().map_err(|e| match e {
            Error::Config(msg) => {
                let key = msg.split_whitespace().next().unwrap_or_default();
                match line_of(text, key) {
                    Some(line) => Error::Config(format!("line {line}: {msg}")),
                    None => Error::Config(msg),
                }
            }
            other => other,
        })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Checks everything that can be checked without running a trial.
    /// Messages start with the offending key.
    pub fn validate(&self) -> Result<()> {
        let p = &self.populations;
        for (name, value) in [
            ("model_mu", p.model_mu),
            ("model_lambda", p.model_lambda),
            ("classifier_mu", p.classifier_mu),
            ("classifier_lambda", p.classifier_lambda),
        ] {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if !(p.sigma_init > 0.0) {
            return Err(Error::Config(format!("sigma_init must be positive, got {}", p.sigma_init)));
        }
        if !(p.sigma_floor > 0.0) {
            return Err(Error::Config(format!("sigma_floor must be positive, got {}", p.sigma_floor)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::Config("snapshot_every must be at least 1".into()));
        }
        if let Some(h) = self.study.hidden {
            if h == 0 {
                return Err(Error::Config("hidden must be at least 1".into()));
            }
        }
        if let Some(theta) = self.study.agent_fov {
            if !(0.0..=std::f64::consts::TAU).contains(&theta) {
                return Err(Error::Config(format!("agent_fov must lie in [0, 2π], got {theta}")));
            }
        }
        if self.engine == Engine::MetricBaseline && self.case_study == CaseStudy::BlackBoxModel {
            return Err(Error::Config(
                "engine metric_baseline is only defined for reactive model spaces".into(),
            ));
        }
        let world = self.world_config()?;
        world.validate()?;
        self.setup()?.validate(p.model_mu + p.model_lambda)?;
        Ok(())
    }

    fn base_world(&self) -> WorldConfig {
        match self.case_study {
            CaseStudy::Clustering => WorldConfig::clustering(),
            CaseStudy::FovMorphology => WorldConfig {
                trial_duration: 100.0,
                ..WorldConfig::aggregation()
            },
            _ => WorldConfig::aggregation(),
        }
    }

    /// The case study's world with the `[world]` overrides applied.
    pub fn world_config(&self) -> Result<WorldConfig> {
        let mut table = toml::Table::try_from(self.base_world()).expect("world serializes");
        for (key, value) in &self.world {
            if !table.contains_key(key) {
                return Err(Error::Config(format!("{key} is not a world setting")));
            }
            table.insert(key.clone(), value.clone());
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("world: {}", e.message())))
    }

    fn sensor_states(&self) -> usize {
        match self.case_study {
            CaseStudy::Clustering => 3,
            _ => 2,
        }
    }

    /// Wheel speeds of the agents.
    pub fn agent_params(&self) -> Result<ReactiveParams> {
        if let Some(values) = &self.study.agent_params {
            let params = ReactiveParams::new(values.clone())
                .map_err(|_| Error::Config(format!("agent_params must hold {} values", 2 * self.sensor_states())))?;
            if params.sensor_state_count() != self.sensor_states() {
                return Err(Error::Config(format!("agent_params must hold {} values", 2 * self.sensor_states())));
            }
            return Ok(params);
        }
        Ok(match self.case_study {
            CaseStudy::Clustering => ReactiveParams::clustering(),
            CaseStudy::RandomReactive => {
                random_reactive(self.study.controller_seed.unwrap_or(self.seed), self.sensor_states())
            }
            _ => ReactiveParams::aggregation(),
        })
    }

    pub fn agent_fov(&self) -> f64 {
        self.study.agent_fov.unwrap_or(0.0)
    }

    pub fn agent(&self) -> Result<Controller> {
        let params = self.agent_params()?;
        Ok(match self.case_study {
            CaseStudy::FovMorphology => Controller::ReactiveSector(params, self.agent_fov()),
            _ => Controller::Reactive(params),
        })
    }

    pub fn model_space(&self) -> ModelSpace {
        let sensor_states = self.sensor_states();
        match self.case_study {
            CaseStudy::FovMorphology => ModelSpace::MorphReactive { sensor_states },
            CaseStudy::BlackBoxModel => ModelSpace::Recurrent {
                hidden: self.study.hidden.unwrap_or(1),
            },
            _ => ModelSpace::Reactive { sensor_states },
        }
    }

    /// The values an identified model is compared with: wheel speeds, then
    /// the field of view for the morphology study.
    pub fn truth(&self) -> Result<Vec<f64>> {
        let mut truth = self.agent_params()?.values().to_vec();
        if self.case_study == CaseStudy::FovMorphology {
            truth.push(self.agent_fov());
        }
        Ok(truth)
    }

    pub fn setup(&self) -> Result<Setup> {
        let world = self.world_config()?;
        Ok(Setup {
            scaling: InputScaling::normalized(world.max_speed, world.inter_wheel_distance),
            agent: self.agent()?,
            model_space: self.model_space(),
            replica_mode: self.replica_mode,
            root_seed: self.seed,
            world,
        })
    }

    /// SHA-256 over the canonical JSON of every setting that affects
    /// results; run length, snapshot cadence and output location are left
    /// out so a run can be resumed and extended.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("configuration serializes");
        if let Some(map) = value.as_object_mut() {
            for key in ["generations", "output_dir", "snapshot_every"] {
                map.remove(key);
            }
        }
        let canonical = serde_json::to_string(&value).expect("json serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Reactive genes as executed: wheel speeds clamped, the field-of-view gene
/// mapped to radians.
pub fn executed_parameters(space: &ModelSpace, genome: &[f64]) -> Vec<f64> {
    match space {
        ModelSpace::Reactive { .. } => genome.iter().map(|v| v.clamp(-1.0, 1.0)).collect(),
        ModelSpace::MorphReactive { .. } => {
            let (&raw, wheels) = genome.split_last().expect("non-empty genome");
            let mut out: Vec<f64> = wheels.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
            out.push(fov_angle(raw));
            out
        }
        ModelSpace::Recurrent { .. } => genome.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::AGGREGATION_TRUTH;

    const DESK: &str = r#"
case_study = "aggregation"
generations = 200
seed = 7

[populations]
model_mu = 10
model_lambda = 10
classifier_mu = 10
classifier_lambda = 10
"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::parse(DESK).unwrap();
        assert_eq!(c.engine, Engine::TuringLearning);
        assert_eq!(c.replica_mode, ReplicaMode::Mixed);
        assert_eq!(c.snapshot_every, 50);
        assert_eq!(c.world_config().unwrap(), WorldConfig::aggregation());
        assert_eq!(c.truth().unwrap(), AGGREGATION_TRUTH.to_vec());
    }

    #[test]
    fn missing_generations_is_named() {
        let text = DESK.replace("generations = 200\n", "");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("generations"), "{err}");
    }

    #[test]
    fn bad_values_report_their_line() {
        let text = DESK.replace("model_mu = 10", "model_mu = 0");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("line 7") && err.contains("model_mu"), "{err}");
        let text = DESK.replace("seed = 7", "seed = \"seven\"");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
    }

    #[test]
    fn world_overrides_apply_and_unknown_keys_fail() {
        let c = ExperimentConfig::parse(&format!("{DESK}\n[world]\ntrial_duration = 5.0\nn_agents = 4\n")).unwrap();
        let w = c.world_config().unwrap();
        assert_eq!((w.trial_duration, w.n_agents, w.init_square_side), (5.0, 4, 331.66));
        let err = ExperimentConfig::parse(&format!("{DESK}\n[world]\nwarp = 9\n")).unwrap_err().to_string();
        assert!(err.contains("warp"), "{err}");
    }

    #[test]
    fn case_studies_build() {
        let with = |case: &str| ExperimentConfig::parse(&DESK.replace("\"aggregation\"", case)).unwrap();
        let c = with("\"clustering\"");
        assert_eq!(c.world_config().unwrap(), WorldConfig::clustering());
        assert_eq!(c.model_space(), ModelSpace::Reactive { sensor_states: 3 });
        let f = with("\"fov_morphology\"");
        assert_eq!(f.world_config().unwrap().trial_duration, 100.0);
        assert_eq!(f.truth().unwrap().len(), 5);
        let b = with("\"black_box_model\"");
        assert_eq!(b.model_space(), ModelSpace::Recurrent { hidden: 1 });
        let r = with("\"random_reactive\"");
        assert_eq!(r.agent_params().unwrap(), random_reactive(7, 2));
    }

    #[test]
    fn round_trip_and_hash() {
        let c = ExperimentConfig::parse(&format!("{DESK}\n[world]\ntrial_duration = 5.0\n")).unwrap();
        let back = ExperimentConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        let longer = ExperimentConfig {
            generations: 1000,
            snapshot_every: 7,
            output_dir: Some("elsewhere".into()),
            ..c.clone()
        };
        assert_eq!(longer.hash(), c.hash());
        let other = ExperimentConfig { seed: 8, ..c.clone() };
        assert_ne!(other.hash(), c.hash());
    }

    #[test]
    fn executed_parameters_clamp_and_map() {
        let p = executed_parameters(&ModelSpace::MorphReactive { sensor_states: 2 }, &[-3.0, 0.2, 1.5, -1.0, 0.0]);
        assert_eq!(&p[..4], &[-1.0, 0.2, 1.0, -1.0]);
        assert!((p[4] - std::f64::consts::PI).abs() < 1e-15);
    }
}
