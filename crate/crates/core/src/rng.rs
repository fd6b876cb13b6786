//! Seeded random streams.
//!
//! Every chain, population and replication gets its own ChaCha8 stream whose
//! seed is derived from the master seed and a path of indices:
//! `seed = mix(mix(mix(master) ^ i0) ^ i1) …` with `mix` the SplitMix64
//! finaliser. Streams are therefore reproducible regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream index of population 1 and 2 inside a comparison.
pub const POPULATION_STREAMS: [u64; 2] = [1, 2];

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &i| splitmix64(acc ^ i))
}

pub fn stream(master: u64, path: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, path))
}
