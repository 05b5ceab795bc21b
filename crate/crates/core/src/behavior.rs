//! Controllers that drive agents and replicas.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{sigmoid, ElmanNet};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::sim::{Brain, Sensor};

/// Ground-truth aggregation controller.
pub const AGGREGATION_TRUTH: [f64; 4] = [-0.7, -1.0, 1.0, -1.0];

/// Ground-truth object-clustering controller.
pub const CLUSTERING_TRUTH: [f64; 6] = [0.5, 1.0, 1.0, 0.5, 0.1, 0.5];

/// Wheel speeds per sensor state, laid out `(l0, r0, l1, r1, ...)`.
///
/// Values are unbounded; they are clamped to `[-1, 1]` when executed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReactiveParams(Vec<f64>);

impl ReactiveParams {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !values.len().is_multiple_of(2) {
            return Err(Error::Config(format!(
                "reactive controllers need an even number (>= 2) of values, got {}",
                values.len()
            )));
        }
        Ok(ReactiveParams(values))
    }

    pub fn aggregation() -> Self {
        ReactiveParams(AGGREGATION_TRUTH.to_vec())
    }

    pub fn clustering() -> Self {
        ReactiveParams(CLUSTERING_TRUTH.to_vec())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn sensor_state_count(&self) -> usize {
        self.0.len() / 2
    }

    /// Wheel command for sensor state `state`, clamped to `[-1, 1]`.
    ///
    /// Panics if `state` is not a valid sensor state.
    pub fn output(&self, state: usize) -> (f64, f64) {
        assert!(
            state < self.sensor_state_count(),
            "sensor state {state} out of range for {} states",
            self.sensor_state_count()
        );
        (self.0[2 * state].clamp(-1.0, 1.0), self.0[2 * state + 1].clamp(-1.0, 1.0))
    }

    pub fn clamped(&self) -> Self {
        ReactiveParams(self.0.iter().map(|v| v.clamp(-1.0, 1.0)).collect())
    }
}

/// Reactive controller whose sensor has an unknown field of view.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphReactiveParams {
    pub reactive: ReactiveParams,
    /// Unbounded gene, squashed onto `(0, 2π)` by [`fov_angle`].
    pub fov_raw: f64,
}

impl MorphReactiveParams {
    pub fn theta(&self) -> f64 {
        fov_angle(self.fov_raw)
    }
}

/// Field-of-view angle for an unbounded gene: `2π · sig(raw)`.
pub fn fov_angle(raw: f64) -> f64 {
    TAU * sigmoid(raw)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Controller {
    Reactive(ReactiveParams),
    MorphReactive(MorphReactiveParams),
    /// 1-input, 2-output Elman network fed the raw sensor state.
    Recurrent(ElmanNet),
    /// Reactive controller reading a sector sensor of fixed angle.
    ReactiveSector(ReactiveParams, f64),
}

impl Controller {
    /// Rebuilds a controller from its serialized form.
    pub fn from_spec(spec: &ControllerSpec) -> Result<Self> {
        let values = spec.values.clone();
        match spec.kind {
            ControllerKind::Reactive => Ok(Controller::Reactive(ReactiveParams::new(values)?)),
            ControllerKind::MorphReactive => {
                let Some((&fov_raw, rest)) = values.split_last() else {
                    return Err(Error::Config("morph_reactive controller has no values".into()));
                };
                Ok(Controller::MorphReactive(MorphReactiveParams {
                    reactive: ReactiveParams::new(rest.to_vec())?,
                    fov_raw,
                }))
            }
            ControllerKind::Recurrent => {
                let hidden = recurrent_hidden_units(values.len()).ok_or_else(|| {
                    Error::Config(format!(
                        "{} weights do not fit a 1-input, 2-output Elman network",
                        values.len()
                    ))
                })?;
                Ok(Controller::Recurrent(ElmanNet::new(1, hidden, 2, values)?))
            }
        }
    }

    pub fn to_spec(&self) -> ControllerSpec {
        match self {
            Controller::Reactive(p) | Controller::ReactiveSector(p, _) => ControllerSpec {
                kind: ControllerKind::Reactive,
                values: p.values().to_vec(),
            },
            Controller::MorphReactive(m) => {
                let mut values = m.reactive.values().to_vec();
                values.push(m.fov_raw);
                ControllerSpec {
                    kind: ControllerKind::MorphReactive,
                    values,
                }
            }
            Controller::Recurrent(net) => ControllerSpec {
                kind: ControllerKind::Recurrent,
                values: net.weights().to_vec(),
            },
        }
    }
}

/// Hidden-layer size of a 1-input, 2-output Elman network with `len`
/// weights (`h² + 4h + 2 = len`).
pub fn recurrent_hidden_units(len: usize) -> Option<usize> {
    (1..=64).find(|&h| ElmanNet::parameter_count(1, h, 2) == len)
}

/// Steps a recurrent controller once, mapping its sigmoid outputs onto
/// signed wheel speeds with `2y - 1`.
pub fn recurrent_output(net: &mut ElmanNet, state: usize) -> (f64, f64) {
    let mut out = [0.0; 2];
    net.forward_into(&[state as f64], &mut out);
    (2.0 * out[0] - 1.0, 2.0 * out[1] - 1.0)
}

impl Brain for Controller {
    fn sensor(&self) -> Sensor {
        match self {
            Controller::MorphReactive(m) => Sensor::Sector(m.theta()),
            Controller::ReactiveSector(_, theta) if *theta > 0.0 => Sensor::Sector(*theta),
            _ => Sensor::LineOfSight,
        }
    }

    fn reset(&mut self) {
        if let Controller::Recurrent(net) = self {
            net.reset();
        }
    }

    fn command(&mut self, state: usize) -> (f64, f64) {
        match self {
            Controller::Reactive(p) | Controller::ReactiveSector(p, _) => p.output(state),
            Controller::MorphReactive(m) => m.reactive.output(state),
            Controller::Recurrent(net) => recurrent_output(net, state),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Reactive,
    MorphReactive,
    Recurrent,
}

/// JSON form of a controller: `{"kind": "...", "values": [...]}`.
///
/// Morphology controllers append the raw field-of-view gene after the wheel
/// speeds; recurrent controllers list their weights in the flat order of
/// [`ElmanNet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerSpec {
    pub kind: ControllerKind,
    pub values: Vec<f64>,
}

/// Uniform random controller in `[-1, 1]^(2n)`.
pub fn random_reactive(seed: u64, sensor_state_count: usize) -> ReactiveParams {
    let mut stream: Stream = rng::stream(seed, &[rng::tag::RANDOM_CONTROLLER]);
    ReactiveParams(
        (0..2 * sensor_state_count)
            .map(|_| stream.random_range(-1.0..=1.0))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn truth_lookups() {
        assert_eq!(ReactiveParams::aggregation().output(0), (-0.7, -1.0));
        assert_eq!(ReactiveParams::clustering().output(1), (1.0, 0.5));
    }

    #[test]
    fn commands_are_clamped() {
        let p = ReactiveParams::new(vec![2.3, -1.7, 0.2, 0.4]).unwrap();
        assert_eq!(p.output(0), (1.0, -1.0));
    }

    #[test]
    #[should_panic]
    fn out_of_range_state_panics() {
        ReactiveParams::aggregation().output(2);
    }

    #[test]
    fn odd_length_is_rejected() {
        assert!(ReactiveParams::new(vec![0.1, 0.2, 0.3]).is_err());
    }

    #[test]
    fn zero_recurrent_net_outputs_zero() {
        let mut net = ElmanNet::zeros(1, 3, 2);
        for state in [0, 1, 0, 1] {
            assert_eq!(recurrent_output(&mut net, state), (0.0, 0.0));
        }
    }

    #[test]
    fn contractive_recurrent_net_settles() {
        let weights: Vec<f64> = (0..ElmanNet::parameter_count(1, 3, 2))
            .map(|k| 0.4 * ((k as f64) * 1.7).sin())
            .collect();
        let mut net = ElmanNet::new(1, 3, 2, weights).unwrap();
        let outputs: Vec<(f64, f64)> = (0..20).map(|_| recurrent_output(&mut net, 1)).collect();
        let (a, b) = (outputs[18], outputs[19]);
        assert!((a.0 - b.0).abs() < 1e-6 && (a.1 - b.1).abs() < 1e-6);
    }

    #[test]
    fn recurrent_replay_after_reset() {
        let weights: Vec<f64> = (0..23).map(|k| ((k * 7 % 5) as f64 - 2.0) * 0.9).collect();
        let mut c = Controller::Recurrent(ElmanNet::new(1, 3, 2, weights).unwrap());
        let inputs = [0, 1, 1, 0, 1, 0, 0];
        let first: Vec<_> = inputs.iter().map(|&i| c.command(i)).collect();
        c.reset();
        let second: Vec<_> = inputs.iter().map(|&i| c.command(i)).collect();
        assert_eq!(first, second);
    }

    #[test]
    fn random_controllers() {
        assert_eq!(random_reactive(9, 2), random_reactive(9, 2));
        assert_ne!(random_reactive(9, 2), random_reactive(10, 2));
        assert_eq!(random_reactive(1, 2).values().len(), 4);
        let n = 10_000;
        let mut sums = [0.0; 4];
        for seed in 0..n {
            for (s, v) in sums.iter_mut().zip(random_reactive(seed, 2).values()) {
                assert!((-1.0..=1.0).contains(v));
                *s += v;
            }
        }
        for s in sums {
            assert!((s / n as f64).abs() < 0.03);
        }
    }

    #[test]
    fn spec_round_trip() {
        let controllers = [
            Controller::Reactive(ReactiveParams::clustering()),
            Controller::MorphReactive(MorphReactiveParams {
                reactive: ReactiveParams::aggregation(),
                fov_raw: -3.0,
            }),
            Controller::Recurrent(ElmanNet::new(1, 1, 2, vec![0.5; 7]).unwrap()),
        ];
        for c in controllers {
            let json = serde_json::to_string(&c.to_spec()).unwrap();
            let back = Controller::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
            assert_eq!(back, c);
        }
        let json = serde_json::to_string(&Controller::Reactive(ReactiveParams::aggregation()).to_spec()).unwrap();
        assert_eq!(json, r#"{"kind":"reactive","values":[-0.7,-1.0,1.0,-1.0]}"#);
    }

    proptest! {
        #[test]
        fn clamping_is_idempotent(values in proptest::collection::vec(-5.0f64..5.0, 4), state in 0usize..2) {
            let p = ReactiveParams::new(values).unwrap();
            prop_assert_eq!(p.clamped().output(state), p.output(state));
        }

        #[test]
        fn fov_is_increasing_and_bounded(a in -30.0f64..30.0, b in -30.0f64..30.0) {
            prop_assume!(a < b);
            let (ta, tb) = (fov_angle(a), fov_angle(b));
            prop_assert!(ta > 0.0 && tb < TAU);
            prop_assert!(ta <= tb);
        }
    }
}
