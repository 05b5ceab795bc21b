//! Post-hoc evaluation of identification runs: parameter errors, swarm-level
//! metrics, classifier post-evaluation and the Mann-Whitney U test.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::behavior::{recurrent_output, Controller, ReactiveParams};
use crate::classifier::{judge, ElmanNet, InputScaling, Judgment, Provenance, SpeedSample};
use crate::error::{Error, Result};
use crate::rng::{self, tag};
use crate::sim::{run_trial, BodyKind, WorldConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelError {
    /// Absolute error per parameter.
    pub ae: Vec<f64>,
    pub mae: f64,
}

pub fn model_error(candidate: &[f64], truth: &[f64]) -> Result<ModelError> {
    if candidate.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            got: candidate.len(),
        });
    }
    let ae: Vec<f64> = candidate.iter().zip(truth).map(|(x, p)| (x - p).abs()).collect();
    let mae = if ae.is_empty() { 0.0 } else { ae.iter().sum::<f64>() / ae.len() as f64 };
    Ok(ModelError { ae, mae })
}

/// Error of the controller a replica actually executes: genes are clamped to
/// `[-1, 1]` before comparison, so drift beyond a wheel's limit is not
/// counted.
pub fn effective_model_error(candidate: &[f64], truth: &[f64]) -> Result<ModelError> {
    let clamped: Vec<f64> = candidate.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
    model_error(&clamped, truth)
}

fn centroid(positions: &[(f64, f64)]) -> (f64, f64) {
    let n = positions.len() as f64;
    let (sx, sy) = positions.iter().fold((0.0, 0.0), |(ax, ay), (x, y)| (ax + x, ay + y));
    (sx / n, sy / n)
}

/// Mean squared distance of the points from their centroid, in cm².
pub fn dispersion(positions: &[(f64, f64)]) -> f64 {
    if positions.is_empty() {
        return 0.0;
    }
    let (cx, cy) = centroid(positions);
    positions
        .iter()
        .map(|(x, y)| (x - cx).powi(2) + (y - cy).powi(2))
        .sum::<f64>()
        / positions.len() as f64
}

struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Size of the largest cluster over the group size. Two robots are
/// neighbours when another robot of the same diameter could not fit between
/// them, i.e. their centres are closer than two diameters.
pub fn largest_cluster_fraction(positions: &[(f64, f64)], body_diameter: f64) -> f64 {
    let n = positions.len();
    if n == 0 {
        return 0.0;
    }
    let reach = 2.0 * body_diameter;
    let mut sets = DisjointSet::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (positions[i], positions[j]);
            if (a.0 - b.0).hypot(a.1 - b.1) < reach {
                sets.union(i, j);
            }
        }
    }
    let largest = (0..n)
        .map(|i| {
            let root = sets.find(i);
            sets.size[root]
        })
        .max()
        .unwrap_or(0);
    largest as f64 / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    pub z: f64,
    /// Two-sided p-value.
    pub p_value: f64,
}

/// Two-sided Mann-Whitney U test using the normal approximation with tie
/// correction and a continuity correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> MannWhitney {
    let (n1, n2) = (a.len(), b.len());
    assert!(n1 > 0 && n2 > 0, "both samples must be non-empty");
    let mut pooled: Vec<(f64, bool)> = a.iter().map(|&x| (x, true)).chain(b.iter().map(|&x| (x, false))).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let n = (n1 + n2) as f64;
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // Ranks i+1 ..= j share their average.
        let avg = (i + 1 + j) as f64 / 2.0;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        rank_sum_a += avg * pooled[i..j].iter().filter(|p| p.1).count() as f64;
        i = j;
    }

    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let u = rank_sum_a - n1f * (n1f + 1.0) / 2.0;
    let mean = n1f * n2f / 2.0;
    let var = n1f * n2f / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return MannWhitney { u, z: 0.0, p_value: 1.0 };
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let p_value = (2.0 * normal.sf(z)).min(1.0);
    MannWhitney { u, z, p_value }
}

/// All reactive controllers whose values come from `settings` evenly spaced
/// points in `[-1, 1]`.
pub fn parameter_grid(settings: usize, sensor_states: usize) -> Vec<ReactiveParams> {
    let levels: Vec<f64> = if settings <= 1 {
        vec![0.0]
    } else {
        (0..settings).map(|k| -1.0 + 2.0 * k as f64 / (settings - 1) as f64).collect()
    };
    let dims = 2 * sensor_states;
    let total = levels.len().pow(dims as u32);
    (0..total)
        .map(|mut code| {
            let mut values = vec![0.0; dims];
            for v in values.iter_mut().rev() {
                *v = levels[code % levels.len()];
                code /= levels.len();
            }
            ReactiveParams::new(values).expect("even length")
        })
        .collect()
}

/// Trials shared by every classifier under post-evaluation.
#[derive(Clone, Debug)]
pub struct PostEvaluation {
    pub world: WorldConfig,
    pub agent: Controller,
    pub scaling: InputScaling,
    pub seed: u64,
    pub trials: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierScore {
    /// Fraction of grid models declared models.
    pub models_detected: f64,
    /// Fraction of agent individuals declared agents.
    pub agents_cleared: f64,
}

impl ClassifierScore {
    pub fn accuracy(&self) -> f64 {
        0.5 * self.models_detected + 0.5 * self.agents_cleared
    }
}

/// Decision accuracy of each classifier over a grid of models, split into
/// its two halves.
///
/// Each grid model runs `trials` trials as the replica among agents. An
/// individual (the replica, or an agent slot) is declared a model only when
/// it is judged a model in every trial. Accuracy weighs the fraction of
/// correct model decisions and correct agent decisions equally.
pub fn post_evaluate_classifiers(
    classifiers: &[ElmanNet],
    grid: &[Controller],
    eval: &PostEvaluation,
) -> Result<Vec<ClassifierScore>> {
    if grid.is_empty() {
        return Err(Error::Config("post-evaluation grid is empty".into()));
    }
    if eval.trials == 0 {
        return Err(Error::Config("post-evaluation needs at least one trial".into()));
    }
    let world = WorldConfig {
        n_replicas: 1,
        ..eval.world.clone()
    };
    let dt = world.control_dt;
    let n_agents = world.n_agents;

    // Per grid model: (model caught?, agents cleared) for every classifier.
    let per_model: Vec<Vec<(bool, usize)>> = grid
        .par_iter()
        .enumerate()
        .map(|(g, model)| {
            let mut replica_samples = Vec::with_capacity(eval.trials);
            let mut agent_samples: Vec<Vec<SpeedSample>> = vec![Vec::with_capacity(eval.trials); n_agents];
            for t in 0..eval.trials {
                let mut brains: Vec<Controller> = std::iter::repeat_n(eval.agent.clone(), n_agents)
                    .chain(std::iter::once(model.clone()))
                    .collect();
                let rec = run_trial(
                    &world,
                    rng::stream(eval.seed, &[tag::POST_EVAL, g as u64, t as u64]),
                    &mut brains,
                    true,
                )?;
                for (body, kind) in rec.kinds.iter().enumerate() {
                    let sample = SpeedSample {
                        pairs: rec.speeds(body, dt)?,
                        provenance: if *kind == BodyKind::Agent {
                            Provenance::Genuine
                        } else {
                            Provenance::Counterfeit
                        },
                        individual: body,
                    };
                    match kind {
                        BodyKind::Agent => agent_samples[body].push(sample),
                        BodyKind::Replica => replica_samples.push(sample),
                        BodyKind::Object => {}
                    }
                }
            }
            classifiers
                .iter()
                .map(|net| {
                    let mut net = net.clone();
                    let mut always_model = |samples: &[SpeedSample]| -> Result<bool> {
                        for s in samples {
                            if judge(&mut net, s, eval.scaling)? == Judgment::Agent {
                                return Ok(false);
                            }
                        }
                        Ok(true)
                    };
                    let caught = always_model(&replica_samples)?;
                    let mut cleared = 0;
                    for samples in &agent_samples {
                        if !always_model(samples)? {
                            cleared += 1;
                        }
                    }
                    Ok((caught, cleared))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let models = grid.len() as f64;
    let agents = (grid.len() * n_agents) as f64;
    Ok((0..classifiers.len())
        .map(|c| {
            let caught = per_model.iter().filter(|row| row[c].0).count() as f64;
            let cleared: usize = per_model.iter().map(|row| row[c].1).sum();
            let agents_cleared = if n_agents == 0 { 1.0 } else { cleared as f64 / agents };
            ClassifierScore {
                models_detected: caught / models,
                agents_cleared,
            }
        })
        .collect())
}

pub fn post_evaluate_classifier(classifier: &ElmanNet, grid: &[Controller], eval: &PostEvaluation) -> Result<f64> {
    Ok(post_evaluate_classifiers(std::slice::from_ref(classifier), grid, eval)?[0].accuracy())
}

/// Outputs of a recurrent model held at each sensor state in turn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    /// Wheel speeds after the last step, laid out like reactive parameters.
    pub outputs: Vec<f64>,
    /// Largest output change over the last step.
    pub last_change: f64,
}

/// Feeds `net` a constant input for `steps` steps, once per sensor state,
/// starting from a cleared memory each time.
pub fn recurrent_steady_state(net: &ElmanNet, sensor_states: usize, steps: usize) -> SteadyState {
    let mut net = net.clone();
    let mut outputs = Vec::with_capacity(2 * sensor_states);
    let mut last_change = 0.0f64;
    for state in 0..sensor_states {
        net.reset();
        let mut prev = (f64::NAN, f64::NAN);
        let mut cur = (0.0, 0.0);
        for _ in 0..steps {
            prev = cur;
            cur = recurrent_output(&mut net, state);
        }
        if steps >= 2 {
            last_change = last_change.max((cur.0 - prev.0).abs()).max((cur.1 - prev.1).abs());
        }
        outputs.extend([cur.0, cur.1]);
    }
    SteadyState { outputs, last_change }
}

/// Mean fraction of control cycles a group spends in each sensor state when
/// every robot runs `controller`.
pub fn sensor_occupancy(world: &WorldConfig, controller: &Controller, trials: usize, seed: u64) -> Result<Vec<f64>> {
    let world = WorldConfig {
        n_agents: world.n_robots(),
        n_replicas: 0,
        ..world.clone()
    };
    let counts: Vec<[u64; 3]> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut brains = vec![controller.clone(); world.n_agents];
            let rec = run_trial(&world, rng::stream(seed, &[tag::OCCUPANCY, t as u64]), &mut brains, false)?;
            let mut total = [0u64; 3];
            for robot in &rec.occupancy {
                for (acc, c) in total.iter_mut().zip(robot) {
                    *acc += *c as u64;
                }
            }
            Ok(total)
        })
        .collect::<Result<_>>()?;
    let mut total = [0u64; 3];
    for c in &counts {
        for (acc, v) in total.iter_mut().zip(c) {
            *acc += v;
        }
    }
    let all: u64 = total.iter().sum();
    Ok(total[..world.sensor_state_count]
        .iter()
        .map(|&c| if all == 0 { 0.0 } else { c as f64 / all as f64 })
        .collect())
}

/// Swarm metrics of a whole group running one controller, sampled over time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwarmSnapshot {
    pub time: f64,
    pub dispersion: f64,
    pub largest_cluster_fraction: f64,
}

/// Runs one trial where every robot executes `controller` and reports
/// robot dispersion (or object dispersion, when the world has objects) every
/// `sample_every` control cycles.
pub fn swarm_series(world: &WorldConfig, controller: &Controller, seed: u64, sample_every: usize) -> Result<Vec<SwarmSnapshot>> {
    let world = WorldConfig {
        n_agents: world.n_robots(),
        n_replicas: 0,
        ..world.clone()
    };
    let rec = run_trial(&world, rng::stream(seed, &[tag::VALIDATION]), &mut vec![controller.clone(); world.n_agents], true)?;
    let tracked: Vec<usize> = if world.n_objects > 0 {
        (world.n_robots()..world.n_bodies()).collect()
    } else {
        (0..world.n_robots()).collect()
    };
    let diameter = if world.n_objects > 0 { world.object_diameter } else { world.body_diameter };
    let steps = rec.trajectories.first().map_or(0, Vec::len);
    Ok((0..steps)
        .step_by(sample_every.max(1))
        .map(|step| {
            let pts: Vec<(f64, f64)> = tracked
                .iter()
                .map(|&b| (rec.trajectories[b][step].x, rec.trajectories[b][step].y))
                .collect();
            SwarmSnapshot {
                time: step as f64 * world.control_dt,
                dispersion: dispersion(&pts),
                largest_cluster_fraction: largest_cluster_fraction(&pts, diameter),
            }
        })
        .collect())
}

/// Dispersion at the end of each of `trials` trials where every robot runs
/// `controller`. Trial `t` starts from the same configuration for every
/// controller given the same `seed`.
pub fn final_dispersions(world: &WorldConfig, controller: &Controller, trials: usize, seed: u64) -> Result<Vec<f64>> {
    let world = WorldConfig {
        n_agents: world.n_robots(),
        n_replicas: 0,
        ..world.clone()
    };
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut brains = vec![controller.clone(); world.n_agents];
            let rec = run_trial(&world, rng::stream(seed, &[tag::VALIDATION, t as u64]), &mut brains, false)?;
            let bodies = &rec.final_state.bodies;
            let pts: Vec<(f64, f64)> = if world.n_objects > 0 {
                bodies.iter().filter(|b| !b.kind.is_robot()).map(|b| (b.pose.x, b.pose.y)).collect()
            } else {
                bodies.iter().map(|b| (b.pose.x, b.pose.y)).collect()
            };
            Ok(dispersion(&pts))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::sigmoid;
    use proptest::prelude::*;

    #[test]
    fn model_error_cases() {
        let truth = [-0.7, -1.0, 1.0, -1.0];
        let zero = model_error(&truth, &truth).unwrap();
        assert!(zero.ae.iter().all(|&e| e == 0.0) && zero.mae == 0.0);
        let e = model_error(&[-0.6, -1.0, 0.8, -1.0], &truth).unwrap();
        let expected = [0.1, 0.0, 0.2, 0.0];
        for (a, b) in e.ae.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((e.mae - 0.075).abs() < 1e-12);
        assert!(model_error(&[0.0], &truth).is_err());
    }

    #[test]
    fn effective_error_ignores_saturated_drift() {
        let truth = [-0.7, -1.0, 1.0, -1.0];
        let e = effective_model_error(&[-0.75, -1.2, 27.9, -8.8], &truth).unwrap();
        assert!((e.mae - 0.0125).abs() < 1e-12);
        assert!((model_error(&[-0.75, -1.2, 27.9, -8.8], &truth).unwrap().mae - 8.7375).abs() < 1e-12);
    }

    #[test]
    fn dispersion_cases() {
        assert_eq!(dispersion(&[(3.0, 4.0); 5]), 0.0);
        let d = 6.0;
        assert!((dispersion(&[(0.0, 0.0), (d, 0.0)]) - d * d / 4.0).abs() < 1e-12);
    }

    #[test]
    fn cluster_cases() {
        let chain: Vec<(f64, f64)> = (0..6).map(|k| (7.0 * k as f64, 0.0)).collect();
        assert_eq!(largest_cluster_fraction(&chain, 7.0), 1.0);
        assert_eq!(largest_cluster_fraction(&[(0.0, 0.0), (70.0, 0.0)], 7.0), 0.5);
        // Exactly two diameters apart leaves room for one more robot.
        assert_eq!(largest_cluster_fraction(&[(0.0, 0.0), (14.0, 0.0)], 7.0), 0.5);
    }

    #[test]
    fn mann_whitney_identical_and_separated() {
        let a: Vec<f64> = (1..=30).map(f64::from).collect();
        assert_eq!(mann_whitney_u(&a, &a).p_value, 1.0);
        let b: Vec<f64> = (31..=60).map(f64::from).collect();
        assert!(mann_whitney_u(&a, &b).p_value < 0.001);
    }

    #[test]
    fn mann_whitney_hand_example() {
        // a = {1, 4, 6, 9}, b = {2, 3, 5, 7}: pooled ranks of a are
        // 1, 4, 6, 8 -> R = 19, U = 19 - 10 = 9; mean 8, var 16*9/12 = 12.
        let r = mann_whitney_u(&[1.0, 4.0, 6.0, 9.0], &[2.0, 3.0, 5.0, 7.0]);
        assert_eq!(r.u, 9.0);
        let z = (9.0f64 - 8.0 - 0.5) / 12.0f64.sqrt();
        assert!((r.z - z).abs() < 1e-12);
        let p = 2.0 * Normal::new(0.0, 1.0).unwrap().sf(z);
        assert!((r.p_value - p).abs() < 1e-12);
    }

    #[test]
    fn mann_whitney_ties() {
        // a = {1, 2, 2}, b = {2, 3}: ranks 1, 3, 3 | 3, 5; one tie group of 3.
        let r = mann_whitney_u(&[1.0, 2.0, 2.0], &[2.0, 3.0]);
        assert_eq!(r.u, 7.0 - 6.0);
        let var = 6.0 / 12.0 * (6.0 - 24.0 / 20.0);
        assert!((r.z - ((1.0f64 - 3.0).abs() - 0.5) / f64::sqrt(var)).abs() < 1e-12);
    }

    #[test]
    fn grid_shape() {
        let grid = parameter_grid(5, 2);
        assert_eq!(grid.len(), 625);
        assert_eq!(grid[0].values(), &[-1.0, -1.0, -1.0, -1.0]);
        assert_eq!(grid[1].values(), &[-1.0, -1.0, -1.0, -0.5]);
        assert_eq!(grid[624].values(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(parameter_grid(11, 2).len(), 14_641);
    }

    #[test]
    fn lone_robot_sees_nothing() {
        let world = WorldConfig {
            n_agents: 1,
            n_replicas: 0,
            ..WorldConfig::aggregation()
        };
        let occ = sensor_occupancy(&world, &Controller::Reactive(ReactiveParams::aggregation()), 3, 1).unwrap();
        assert_eq!(occ, vec![1.0, 0.0]);
    }

    fn union_find_oracle(points: &[(f64, f64)], diameter: f64) -> f64 {
        // Breadth-first search over the same adjacency.
        let n = points.len();
        let mut seen = vec![false; n];
        let mut best = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut queue = vec![start];
            seen[start] = true;
            let mut size = 0;
            while let Some(i) = queue.pop() {
                size += 1;
                for j in 0..n {
                    let d = (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1);
                    if !seen[j] && d < 2.0 * diameter {
                        seen[j] = true;
                        queue.push(j);
                    }
                }
            }
            best = best.max(size);
        }
        best as f64 / n as f64
    }

    #[test]
    fn steady_state_of_a_feedforward_net() {
        // No recurrence: the output is reached on the first step.
        let mut w = vec![0.0; ElmanNet::parameter_count(1, 1, 2)];
        w[0] = 3.0; // input -> h
        w[3] = 2.0; // h -> left
        w[4] = -2.0; // h -> right
        let net = ElmanNet::new(1, 1, 2, w).unwrap();
        let s = recurrent_steady_state(&net, 2, 20);
        let out = |h: f64| (2.0 * sigmoid(2.0 * h) - 1.0, 2.0 * sigmoid(-2.0 * h) - 1.0);
        let (a, b) = (out(0.5), out(sigmoid(3.0)));
        for (x, y) in s.outputs.iter().zip([a.0, a.1, b.0, b.1]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(s.last_change, 0.0);
    }

    proptest! {
        #[test]
        fn dispersion_is_rigid_motion_invariant(
            pts in proptest::collection::vec((-200.0f64..200.0, -200.0f64..200.0), 1..30),
            dx in -500.0f64..500.0, dy in -500.0f64..500.0, angle in -3.2f64..3.2,
        ) {
            let base = dispersion(&pts);
            let (c, s) = (angle.cos(), angle.sin());
            let moved: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (c * x - s * y + dx, s * x + c * y + dy)).collect();
            prop_assert!((dispersion(&moved) - base).abs() <= 1e-9 * base.max(1.0));
        }

        #[test]
        fn clusters_match_search_oracle(pts in proptest::collection::vec((0.0f64..120.0, 0.0f64..120.0), 1..40)) {
            prop_assert_eq!(largest_cluster_fraction(&pts, 7.0), union_find_oracle(&pts, 7.0));
        }

        #[test]
        fn model_error_is_symmetric(a in proptest::collection::vec(-3.0f64..3.0, 4), b in proptest::collection::vec(-3.0f64..3.0, 4)) {
            prop_assert_eq!(model_error(&a, &b).unwrap(), model_error(&b, &a).unwrap());
        }
    }
}
