//! Seed derivation for independent random streams.
//!
//! Every stochastic component draws from its own stream keyed by a base seed
//! and a path of integers (epoch, iteration, scenario, ...). Streams with
//! different keys never share state, so e.g. scenario sampling inside a
//! policy cannot shift the realized arrivals of an episode.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags used as the first key component.
pub mod stream {
    pub const ARRIVALS: u64 = 1;
    pub const ROUTING: u64 = 2;
    pub const POLICY: u64 = 3;
    pub const HINDSIGHT: u64 = 4;
    pub const TOPOLOGY: u64 = 5;
    pub const EPISODE: u64 = 6;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn rng_from(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn child_rng(base: u64, path: &[u64]) -> Rng {
    rng_from(derive_seed(base, path))
}
