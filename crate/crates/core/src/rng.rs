//! Reproducible random streams.
//!
//! All sampling goes through [`ChaCha8Rng`]. A run is described by one 64-bit
//! seed; shot `k` of that run draws from its own generator seeded with
//! [`shot_seed`]`(seed, k)`, so shots can execute in any order or in parallel
//! and still reproduce bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Seed used when neither `--seed` nor the environment provides one.
pub const DEFAULT_SEED: u64 = 0x5EED_0001;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed for shot `index` of the run seeded with `seed`.
pub fn shot_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn shot_rng(seed: u64, index: u64) -> SimRng {
    rng_from_seed(shot_seed(seed, index))
}
