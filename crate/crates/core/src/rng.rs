//! Deterministic random streams.
//!
//! Every stochastic step draws from its own ChaCha stream whose seed is a
//! hash of the run's root seed and a short path of integers (a purpose tag,
//! the generation, the trial index, ...). Streams therefore never depend on
//! the order in which parallel jobs happen to run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Purpose tags mixed into derived seeds.
pub mod tag {
    pub const INIT_MODELS: u64 = 0x10;
    pub const INIT_CLASSIFIERS: u64 = 0x11;
    pub const ES_MODELS: u64 = 0x20;
    pub const ES_CLASSIFIERS: u64 = 0x21;
    pub const TRIAL: u64 = 0x30;
    pub const TRIAL_AGENTS: u64 = 0x31;
    pub const TRIAL_REPLICAS: u64 = 0x32;
    pub const POST_EVAL: u64 = 0x40;
    pub const VALIDATION: u64 = 0x41;
    pub const OCCUPANCY: u64 = 0x42;
    pub const RANDOM_CONTROLLER: u64 = 0x50;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes `root` together with `path` into a 64-bit seed.
pub fn derive_seed(root: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(root), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(root: u64, path: &[u64]) -> Stream {
    Stream::seed_from_u64(derive_seed(root, path))
}
