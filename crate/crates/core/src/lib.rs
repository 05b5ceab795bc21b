//! Metric-free identification of swarm behaviours.
//!
//! Candidate models of an agent's controller coevolve against classifiers
//! that try to tell real agents from model-driven replicas by their motion
//! alone. A metric-based baseline, the closed-form analysis of why it
//! fails, and tools for evaluating identified models live alongside.

pub mod analysis;
pub mod baseline;
pub mod behavior;
pub mod classifier;
pub mod coevolution;
pub mod config;
pub mod error;
pub mod rng;
pub mod runner;
pub mod sim;

pub use behavior::{Controller, ReactiveParams, AGGREGATION_TRUTH, CLUSTERING_TRUTH};
pub use classifier::{ElmanNet, InputScaling, Judgment};
pub use coevolution::{EsParams, ModelSpace, ReplicaMode, RunState, Setup, TuringLearning};
pub use error::{Error, Result};
pub use sim::WorldConfig;
