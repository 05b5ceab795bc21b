//! Why least squares cannot recover a reactive controller: for a mixture
//! output, the squared-error optimum puts both model outputs on the mean.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use turing_swarm::baseline::{
    discrete_expected_error, discrete_optimum, nonstationary_optimum, theorem1_bruteforce, theorem1_optimum,
    BernoulliMixture,
};

fn main() -> turing_swarm::Result<()> {
    let aggregation = BernoulliMixture { p: 0.912, y1: -0.7, y2: 1.0 };
    let (x1, x2) = theorem1_optimum(&aggregation)?;
    println!("aggregation left wheel: optimum ({x1:.4}, {x2:.4}), E(Y) {:.4}", aggregation.mean());
    println!(
        "  D(optimum) {:.5} < D(truth) {:.5}",
        aggregation.expected_error(x1, x2),
        aggregation.expected_error(aggregation.y1, aggregation.y2)
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mix = BernoulliMixture {
            p: rng.random_range(0.05..0.95),
            y1: rng.random_range(-1.0..1.0),
            y2: rng.random_range(-1.0..1.0),
        };
        let (a1, a2) = theorem1_optimum(&mix)?;
        let (b1, b2) = theorem1_bruteforce(&mix, 41);
        worst = worst.max((a1 - b1).abs()).max((a2 - b2).abs());
    }
    println!("1000 random mixtures: largest gap to brute force {worst:.2e}");

    let ps = [0.95, 0.9, 0.85, 0.8];
    let (n1, n2) = nonstationary_optimum(&ps, -0.7, 1.0);
    println!("drifting occupancy {ps:?}: optimum ({n1:.4}, {n2:.4}), no longer equal");

    let probs = [0.532, 0.342, 0.126];
    let ys = [0.5, 1.0, 0.1];
    let xs = discrete_optimum(&probs, &ys);
    println!(
        "three-state clustering left wheel: optimum {:.4} everywhere, D {:.5} vs truth {:.5}",
        xs[0],
        discrete_expected_error(&probs, &ys, &xs),
        discrete_expected_error(&probs, &ys, &ys)
    );
    Ok(())
}
