//! Seed derivation.
//!
//! Every run has one base seed. Consumers (noise, initial design, optimizer)
//! draw from their own ChaCha stream whose seed is derived from the base seed
//! and a stream tag, so the noise sequence does not depend on how many random
//! numbers the optimizer consumed and vice versa.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream type used everywhere in the crate.
pub type Rng = ChaCha8Rng;

/// Independent consumers of randomness within a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Observation noise on objective and constraints.
    Noise,
    /// Initial design.
    Sampler,
    /// Internal randomness of the optimizer.
    Optimizer,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Noise => 0x6e6f_6973_6500_0001,
            Stream::Sampler => 0x7361_6d70_6c00_0002,
            Stream::Optimizer => 0x6f70_7469_6d00_0003,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combine a seed with a further value.
pub fn combine(seed: u64, value: u64) -> u64 {
    mix64(seed ^ mix64(value))
}

/// Stable 64-bit FNV-1a hash of a byte string.
pub fn hash_bytes(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Seed of a sub-stream of `base`.
pub fn stream_seed(base: u64, stream: Stream) -> u64 {
    combine(base, stream.tag())
}

/// Fresh generator for a sub-stream of `base`.
pub fn stream(base: u64, stream: Stream) -> Rng {
    Rng::seed_from_u64(stream_seed(base, stream))
}

/// Generator seeded directly.
pub fn from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
