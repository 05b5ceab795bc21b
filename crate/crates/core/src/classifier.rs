//! Elman recurrent networks and the trajectory classifier built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Elman network with logistic units, biases on the hidden and output
/// layers, and full recurrence on the hidden layer.
///
/// Weights are stored flat in row-major order: `w_in` is `(n_in + 1) ×
/// n_hidden` with the bias row last, then `w_rec` (`n_hidden × n_hidden`,
/// row = source unit), then `w_out` (`(n_hidden + 1) × n_out`, bias row
/// last).
#[derive(Clone, Debug, PartialEq)]
pub struct ElmanNet {
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
    weights: Vec<f64>,
    hidden: Vec<f64>,
    scratch: Vec<f64>,
}

impl ElmanNet {
    pub fn parameter_count(n_in: usize, n_hidden: usize, n_out: usize) -> usize {
        (n_in + 1) * n_hidden + n_hidden * n_hidden + (n_hidden + 1) * n_out
    }

    pub fn new(n_in: usize, n_hidden: usize, n_out: usize, weights: Vec<f64>) -> Result<Self> {
        let expected = Self::parameter_count(n_in, n_hidden, n_out);
        if weights.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: weights.len(),
            });
        }
        Ok(ElmanNet {
            n_in,
            n_hidden,
            n_out,
            weights,
            hidden: vec![0.0; n_hidden],
            scratch: vec![0.0; n_hidden],
        })
    }

    pub fn zeros(n_in: usize, n_hidden: usize, n_out: usize) -> Self {
        let len = Self::parameter_count(n_in, n_hidden, n_out);
        ElmanNet::new(n_in, n_hidden, n_out, vec![0.0; len]).expect("length matches")
    }

    /// The 2-5-1 trajectory classifier.
    pub fn classifier(weights: Vec<f64>) -> Result<Self> {
        ElmanNet::new(2, 5, 1, weights)
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_in, self.n_hidden, self.n_out)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn hidden(&self) -> &[f64] {
        &self.hidden
    }

    pub fn reset(&mut self) {
        self.hidden.fill(0.0);
    }

    /// One time step: updates the hidden layer from `input` and the previous
    /// hidden state, then writes the outputs into `output`.
    pub fn forward_into(&mut self, input: &[f64], output: &mut [f64]) {
        debug_assert_eq!(input.len(), self.n_in);
        debug_assert_eq!(output.len(), self.n_out);
        let h = self.n_hidden;
        let (w_in, rest) = self.weights.split_at(h * (self.n_in + 1));
        let (w_rec, w_out) = rest.split_at(h * h);

        self.scratch.copy_from_slice(&w_in[self.n_in * h..]);
        for (i, &x) in input.iter().enumerate() {
            for (acc, w) in self.scratch.iter_mut().zip(&w_in[i * h..(i + 1) * h]) {
                *acc += w * x;
            }
        }
        for (k, &prev) in self.hidden.iter().enumerate() {
            for (acc, w) in self.scratch.iter_mut().zip(&w_rec[k * h..(k + 1) * h]) {
                *acc += w * prev;
            }
        }
        for (dst, &acc) in self.hidden.iter_mut().zip(&self.scratch) {
            *dst = sigmoid(acc);
        }

        let o = self.n_out;
        output.copy_from_slice(&w_out[h * o..]);
        for (k, &act) in self.hidden.iter().enumerate() {
            for (acc, w) in output.iter_mut().zip(&w_out[k * o..(k + 1) * o]) {
                *acc += w * act;
            }
        }
        for y in output.iter_mut() {
            *y = sigmoid(*y);
        }
    }

    pub fn forward_step(&mut self, input: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_out];
        self.forward_into(input, &mut out);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Genuine,
    Counterfeit,
}

/// A motion time series of one individual: (linear, angular) speed per
/// control cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeedSample {
    pub pairs: Vec<(f64, f64)>,
    pub provenance: Provenance,
    pub individual: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Judgment {
    Agent,
    Model,
}

/// Divisors applied to (linear, angular) speed before they enter the
/// classifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputScaling {
    pub linear: f64,
    pub angular: f64,
}

impl InputScaling {
    pub const RAW: InputScaling = InputScaling {
        linear: 1.0,
        angular: 1.0,
    };

    /// Maps speeds of a robot with the given top speed and wheel base onto
    /// `[-1, 1]`.
    pub fn normalized(max_speed: f64, inter_wheel_distance: f64) -> Self {
        InputScaling {
            linear: max_speed,
            angular: 2.0 * max_speed / inter_wheel_distance,
        }
    }
}

impl Default for InputScaling {
    fn default() -> Self {
        InputScaling::normalized(12.8, 5.1)
    }
}

/// Runs a sample through the classifier and returns the final output.
pub fn final_output(net: &mut ElmanNet, pairs: &[(f64, f64)], scaling: InputScaling) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptySample);
    }
    net.reset();
    let mut out = [0.0];
    for &(s, w) in pairs {
        net.forward_into(&[s / scaling.linear, w / scaling.angular], &mut out);
    }
    net.reset();
    Ok(out[0])
}

/// Judges a sample: an output below 0.5 means "model", anything else
/// "agent". The network's memory is cleared before and after.
pub fn judge(net: &mut ElmanNet, sample: &SpeedSample, scaling: InputScaling) -> Result<Judgment> {
    let y = final_output(net, &sample.pairs, scaling)?;
    Ok(if y < 0.5 { Judgment::Model } else { Judgment::Agent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(pairs: Vec<(f64, f64)>) -> SpeedSample {
        SpeedSample {
            pairs,
            provenance: Provenance::Genuine,
            individual: 0,
        }
    }

    #[test]
    fn classifier_has_46_parameters() {
        assert_eq!(ElmanNet::parameter_count(2, 5, 1), 46);
        // Black-box model sizes for 1, 3 and 5 hidden units.
        assert_eq!(ElmanNet::parameter_count(1, 1, 2), 7);
        assert_eq!(ElmanNet::parameter_count(1, 3, 2), 23);
        assert_eq!(ElmanNet::parameter_count(1, 5, 2), 47);
    }

    #[test]
    fn wrong_weight_count_is_rejected() {
        assert!(ElmanNet::classifier(vec![0.0; 45]).is_err());
    }

    #[test]
    fn sigmoid_identities() {
        assert_eq!(sigmoid(0.0), 0.5);
        for x in [-7.3, -1.0, 0.25, 3.0, 19.0] {
            assert!((sigmoid(x) + sigmoid(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_net_outputs_half() {
        let mut net = ElmanNet::classifier(vec![0.0; 46]).unwrap();
        assert_eq!(net.forward_step(&[3.0, -2.0]), vec![0.5]);
        let s = sample(vec![(1.0, 2.0), (-4.0, 0.5)]);
        assert_eq!(judge(&mut net, &s, InputScaling::default()).unwrap(), Judgment::Agent);
    }

    #[test]
    fn hand_computed_single_hidden_unit() {
        // 2 inputs, 1 hidden unit, 1 output, no recurrence.
        // w_in rows: x0 -> 0.5, x1 -> -1.5, bias -> 0.25; w_rec = 0;
        // w_out rows: h -> 2.0, bias -> -0.75.
        let mut net = ElmanNet::new(2, 1, 1, vec![0.5, -1.5, 0.25, 0.0, 2.0, -0.75]).unwrap();
        let x = [0.8, 0.3];
        let h = 1.0 / (1.0 + (-(0.5 * 0.8 - 1.5 * 0.3 + 0.25f64)).exp());
        let y = 1.0 / (1.0 + (-(2.0 * h - 0.75f64)).exp());
        let out = net.forward_step(&x);
        assert!((out[0] - y).abs() < 1e-12);
        assert!((net.hidden()[0] - h).abs() < 1e-12);
    }

    #[test]
    fn judging_is_stateless() {
        let weights: Vec<f64> = (0..46).map(|k| ((k * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let mut net = ElmanNet::classifier(weights).unwrap();
        let s = sample((0..100).map(|k| ((k as f64).sin() * 12.0, (k as f64 * 0.3).cos())).collect());
        let first = final_output(&mut net, &s.pairs, InputScaling::default()).unwrap();
        let second = final_output(&mut net, &s.pairs, InputScaling::default()).unwrap();
        assert_eq!(first, second);
        assert!(net.hidden().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn empty_sample_is_rejected() {
        let mut net = ElmanNet::classifier(vec![0.0; 46]).unwrap();
        assert!(matches!(
            judge(&mut net, &sample(vec![]), InputScaling::default()),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn sequence_order_matters() {
        // One hidden unit tracking the sign of the latest linear speed; the
        // two samples hold the same steps in opposite order.
        let mut w = vec![0.0; ElmanNet::parameter_count(2, 1, 1)];
        w[0] = 20.0; // x0 -> h
        w[2] = -10.0; // bias -> h
        w[4] = 20.0; // h -> y
        w[5] = -10.0; // bias -> y
        let mut net = ElmanNet::new(2, 1, 1, w).unwrap();
        let a = [(1.0, 0.0), (-1.0, 0.0)];
        let b = [(-1.0, 0.0), (1.0, 0.0)];
        let ya = final_output(&mut net, &a, InputScaling::RAW).unwrap();
        let yb = final_output(&mut net, &b, InputScaling::RAW).unwrap();
        assert!(ya < 0.5 && yb >= 0.5, "{ya} {yb}");
    }
}
