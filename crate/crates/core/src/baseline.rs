//! The least-squares identification baseline and the analysis of why it
//! cannot recover a reactive controller from motion alone.
//!
//! The baseline runs the same model ES and the same trials as Turing
//! Learning, but scores each model by the summed squared difference between
//! its speed series and those of the agents it was observed with.

use serde::{Deserialize, Serialize};

use crate::behavior::Controller;
use crate::classifier::SpeedSample;
use crate::coevolution::{es_step, observe, EsParams, Population, Setup};
use crate::error::{Error, Result};
use crate::rng::{self, tag};

/// Summed squared speed error of a model against a set of agents:
/// `Σ_agents Σ_t (s_m - s_a)² + (ω_m - ω_a)²`.
pub fn metric_error(model: &SpeedSample, agents: &[&SpeedSample]) -> Result<f64> {
    let mut total = 0.0;
    for agent in agents {
        if agent.pairs.len() != model.pairs.len() {
            return Err(Error::LengthMismatch {
                expected: model.pairs.len(),
                got: agent.pairs.len(),
            });
        }
        for (&(sm, wm), &(sa, wa)) in model.pairs.iter().zip(&agent.pairs) {
            total += (sm - sa).powi(2) + (wm - wa).powi(2);
        }
    }
    Ok(total)
}

/// One generation of the metric baseline.
#[derive(Clone, Debug)]
pub struct MetricRecord {
    pub generation: usize,
    /// `e_m` per model, smaller is better.
    pub errors: Vec<f64>,
    pub best_model_index: usize,
    pub best_model: Vec<f64>,
}

impl MetricRecord {
    /// Fitness reported in run logs: `-e_m` of the best model.
    pub fn best_fitness(&self) -> f64 {
        -self.errors[self.best_model_index]
    }
}

/// State of a baseline run after `generation` completed generations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricState {
    pub generation: usize,
    pub models: Population,
}

/// Single-population ES minimizing [`metric_error`], with the trial setup,
/// seeds and evaluation budget of the coevolutionary run.
#[derive(Clone, Debug)]
pub struct MetricBaseline {
    pub setup: Setup,
    pub model_es: EsParams,
}

impl MetricBaseline {
    pub fn initial_state(&self) -> MetricState {
        MetricState {
            generation: 0,
            models: Population::random(
                self.setup.model_space.genome_len(),
                &self.model_es,
                &mut rng::stream(self.setup.root_seed, &[tag::INIT_MODELS]),
            ),
        }
    }

    pub fn advance(&self, state: &mut MetricState) -> Result<MetricRecord> {
        let g = state.generation;
        if g > 0 {
            state.models = es_step(
                &state.models,
                &self.model_es,
                &mut rng::stream(self.setup.root_seed, &[tag::ES_MODELS, g as u64]),
            );
        }
        let controllers: Vec<Controller> = state
            .models
            .members
            .iter()
            .map(|m| self.setup.model_space.decode(&m.genome))
            .collect::<Result<_>>()?;
        let obs = observe(&self.setup, &controllers, g)?;
        let errors: Vec<f64> = obs
            .counterfeit
            .iter()
            .zip(&obs.peers)
            .map(|(model, peers)| {
                let agents: Vec<&SpeedSample> = peers.iter().map(|&k| &obs.genuine[k]).collect();
                metric_error(model, &agents)
            })
            .collect::<Result<_>>()?;
        for (m, e) in state.models.members.iter_mut().zip(&errors) {
            m.fitness = Some(-e);
        }
        let best_model_index = state.models.ranking()[0];
        state.generation += 1;
        Ok(MetricRecord {
            generation: g,
            best_model: state.models.members[best_model_index].genome.clone(),
            best_model_index,
            errors,
        })
    }

    pub fn run(&self, generations: usize, mut observer: impl FnMut(&MetricRecord, &MetricState)) -> Result<MetricState> {
        let mut state = self.initial_state();
        for _ in 0..generations {
            let record = self.advance(&mut state)?;
            observer(&record, &state);
        }
        Ok(state)
    }
}

/// An output `Y` that equals `y1` with probability `p` and `y2` otherwise,
/// matched by a model output `X` driven by an independent input with the
/// same distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliMixture {
    pub p: f64,
    pub y1: f64,
    pub y2: f64,
}

impl BernoulliMixture {
    pub fn mean(&self) -> f64 {
        self.p * self.y1 + (1.0 - self.p) * self.y2
    }

    /// `E{(X - Y)²}` for a model answering `x1` / `x2`.
    pub fn expected_error(&self, x1: f64, x2: f64) -> f64 {
        let (p, q) = (self.p, 1.0 - self.p);
        p * p * (x1 - self.y1).powi(2)
            + p * q * (x1 - self.y2).powi(2)
            + q * p * (x2 - self.y1).powi(2)
            + q * q * (x2 - self.y2).powi(2)
    }
}

/// The minimizer of the expected squared error: both outputs collapse onto
/// `E{Y}`. Only unique for `p` strictly inside (0, 1).
pub fn theorem1_optimum(mix: &BernoulliMixture) -> Result<(f64, f64)> {
    if !(mix.p > 0.0 && mix.p < 1.0) {
        return Err(Error::DegenerateMixture(mix.p));
    }
    let m = mix.mean();
    Ok((m, m))
}

/// Minimizes `objective` over a box by grid search followed by a shrinking
/// coordinate pattern search.
pub fn grid_minimize(objective: impl Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], resolution: usize) -> Vec<f64> {
    let dims = lo.len();
    let resolution = resolution.max(2);
    let axis = |d: usize, k: usize| lo[d] + (hi[d] - lo[d]) * k as f64 / (resolution - 1) as f64;

    let mut best = lo.to_vec();
    let mut best_value = objective(&best);
    let mut index = vec![0usize; dims];
    let mut point = vec![0.0; dims];
    'grid: loop {
        for d in 0..dims {
            point[d] = axis(d, index[d]);
        }
        let v = objective(&point);
        if v < best_value {
            best_value = v;
            best.copy_from_slice(&point);
        }
        for d in 0..dims {
            index[d] += 1;
            if index[d] < resolution {
                continue 'grid;
            }
            index[d] = 0;
        }
        break;
    }

    let mut step: Vec<f64> = (0..dims).map(|d| (hi[d] - lo[d]) / (resolution - 1) as f64).collect();
    while step.iter().any(|&s| s > 1e-12) {
        let mut moved = false;
        for d in 0..dims {
            for dir in [-1.0, 1.0] {
                let mut trial = best.clone();
                trial[d] += dir * step[d];
                let v = objective(&trial);
                if v < best_value {
                    best_value = v;
                    best = trial;
                    moved = true;
                }
            }
        }
        if !moved {
            for s in step.iter_mut() {
                *s /= 2.0;
            }
        }
    }
    best
}

fn bracket(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo - 1.0, hi + 1.0)
}

/// Numerical minimizer of [`BernoulliMixture::expected_error`].
pub fn theorem1_bruteforce(mix: &BernoulliMixture, grid_resolution: usize) -> (f64, f64) {
    let (lo, hi) = bracket(&[mix.y1, mix.y2]);
    let x = grid_minimize(|x| mix.expected_error(x[0], x[1]), &[lo, lo], &[hi, hi], grid_resolution);
    (x[0], x[1])
}

/// Expected error summed over time steps whose input probability `p_t`
/// changes from step to step.
pub fn nonstationary_expected_error(ps: &[f64], y1: f64, y2: f64, x1: f64, x2: f64) -> f64 {
    ps.iter()
        .map(|&p| BernoulliMixture { p, y1, y2 }.expected_error(x1, x2))
        .sum()
}

/// Closed-form minimizer of [`nonstationary_expected_error`].
pub fn nonstationary_optimum(ps: &[f64], y1: f64, y2: f64) -> (f64, f64) {
    let sum_p: f64 = ps.iter().sum();
    let sum_q: f64 = ps.iter().map(|p| 1.0 - p).sum();
    let sum_pp: f64 = ps.iter().map(|p| p * p).sum();
    let sum_pq: f64 = ps.iter().map(|p| p * (1.0 - p)).sum();
    let sum_qq: f64 = ps.iter().map(|p| (1.0 - p) * (1.0 - p)).sum();
    let x1 = (sum_pp * y1 + sum_pq * y2) / sum_p;
    let x2 = (sum_pq * y1 + sum_qq * y2) / sum_q;
    (x1, x2)
}

/// `E{(X - Y)²}` for discrete `X`, `Y` sharing state probabilities `ps`.
pub fn discrete_expected_error(ps: &[f64], ys: &[f64], xs: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&pi, &xi) in ps.iter().zip(xs) {
        for (&pj, &yj) in ps.iter().zip(ys) {
            d += pi * pj * (xi - yj).powi(2);
        }
    }
    d
}

/// Minimizer of [`discrete_expected_error`]: every output equals `E{Y}`.
pub fn discrete_optimum(ps: &[f64], ys: &[f64]) -> Vec<f64> {
    let mean: f64 = ps.iter().zip(ys).map(|(p, y)| p * y).sum();
    vec![mean; ps.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::Provenance;
    use proptest::prelude::*;

    fn sample(pairs: Vec<(f64, f64)>) -> SpeedSample {
        SpeedSample {
            pairs,
            provenance: Provenance::Genuine,
            individual: 0,
        }
    }

    #[test]
    fn metric_error_cases() {
        let a = sample(vec![(1.0, 2.0), (3.0, -1.0)]);
        assert_eq!(metric_error(&a, &[&a]).unwrap(), 0.0);
        let m = sample(vec![(1.0, 2.0)]);
        let b = sample(vec![(0.0, 0.0)]);
        assert_eq!(metric_error(&m, &[&b]).unwrap(), 5.0);
        assert!(matches!(metric_error(&a, &[&b]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn weighted_mean_for_left_wheel() {
        let mix = BernoulliMixture {
            p: 0.912,
            y1: -0.7,
            y2: 1.0,
        };
        let (x1, x2) = theorem1_optimum(&mix).unwrap();
        assert!((x1 + 0.5504).abs() < 1e-12);
        assert_eq!(x1, x2);
    }

    #[test]
    fn degenerate_and_symmetric_mixtures() {
        let same = BernoulliMixture { p: 0.3, y1: 0.4, y2: 0.4 };
        let (x1, x2) = theorem1_optimum(&same).unwrap();
        assert!((x1 - 0.4).abs() < 1e-15 && (x2 - 0.4).abs() < 1e-15);
        let sym = BernoulliMixture { p: 0.5, y1: 1.0, y2: -1.0 };
        assert_eq!(theorem1_optimum(&sym).unwrap(), (0.0, 0.0));
        for p in [0.0, 1.0] {
            assert!(theorem1_optimum(&BernoulliMixture { p, y1: 1.0, y2: 0.0 }).is_err());
        }
    }

    #[test]
    fn nonstationary_closed_form_matches_grid() {
        let ps = [0.9, 0.8, 0.95, 0.7, 0.85];
        let (y1, y2) = (-0.7, 1.0);
        let (x1, x2) = nonstationary_optimum(&ps, y1, y2);
        let grid = grid_minimize(
            |x| nonstationary_expected_error(&ps, y1, y2, x[0], x[1]),
            &[-2.0, -2.0],
            &[2.0, 2.0],
            201,
        );
        assert!((grid[0] - x1).abs() < 1e-6 && (grid[1] - x2).abs() < 1e-6);
        assert!((x1 - y1).abs() > 0.1, "truth is not the optimum");
    }

    #[test]
    fn three_state_optimum_is_the_mean() {
        let ps = [0.532, 0.342, 0.126];
        let ys = [0.5, 1.0, 0.1];
        let x = discrete_optimum(&ps, &ys);
        let grid = grid_minimize(|x| discrete_expected_error(&ps, &ys, x), &[-1.0; 3], &[2.0; 3], 61);
        for (a, b) in x.iter().zip(&grid) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        assert!(discrete_expected_error(&ps, &ys, &x) < discrete_expected_error(&ps, &ys, &ys));
    }

    #[test]
    fn metric_error_matches_reversed_summation() {
        let mut stream = rng::stream(11, &[]);
        use rand::Rng;
        let mut series = || sample((0..100).map(|_| (stream.random_range(-13.0..13.0), stream.random_range(-5.0..5.0))).collect());
        let model = series();
        let agents: Vec<SpeedSample> = (0..10).map(|_| series()).collect();
        let refs: Vec<&SpeedSample> = agents.iter().collect();
        let fast = metric_error(&model, &refs).unwrap();
        let mut slow = 0.0;
        for t in (0..100).rev() {
            for a in agents.iter().rev() {
                slow += (model.pairs[t].1 - a.pairs[t].1).powi(2);
                slow += (model.pairs[t].0 - a.pairs[t].0).powi(2);
            }
        }
        assert!((fast - slow).abs() <= 1e-12 * fast);
    }

    proptest! {
        #[test]
        fn agent_order_does_not_matter(
            model in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 8),
            a in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 8),
            b in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 8),
        ) {
            let (m, a, b) = (sample(model), sample(a), sample(b));
            let ab = metric_error(&m, &[&a, &b]).unwrap();
            let ba = metric_error(&m, &[&b, &a]).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));
        }

        #[test]
        fn angular_perturbation_leaves_linear_part(
            model in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 6),
            agent in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 6),
            shift in -3.0f64..3.0,
        ) {
            let linear_only = |s: &[(f64, f64)]| sample(s.iter().map(|&(v, _)| (v, 0.0)).collect());
            let bumped = sample(agent.iter().map(|&(v, w)| (v, w + shift)).collect());
            let m = sample(model.clone());
            let full_before = metric_error(&m, &[&sample(agent.clone())]).unwrap();
            let full_after = metric_error(&m, &[&bumped]).unwrap();
            let lin = metric_error(&linear_only(&model), &[&linear_only(&agent)]).unwrap();
            let ang = |s: &[(f64, f64)]| sample(s.iter().map(|&(_, w)| (0.0, w)).collect());
            let ang_before = metric_error(&ang(&model), &[&ang(&agent)]).unwrap();
            let ang_after = metric_error(&ang(&model), &[&ang(&bumped.pairs)]).unwrap();
            prop_assert!((full_before - (lin + ang_before)).abs() < 1e-9);
            prop_assert!((full_after - (lin + ang_after)).abs() < 1e-9);
        }
    }
}
