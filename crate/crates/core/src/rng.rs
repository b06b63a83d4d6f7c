//! Seed handling.
//!
//! All randomness derives from a single 64-bit master seed. Independent
//! consumers get their own seed through [`sub_seed`], which hashes
//! `(master, label)` with SplitMix64; Monte-Carlo chunks use ChaCha8 stream
//! `k` of the consumer's seed ([`stream`]). The mapping is fixed, so results
//! depend only on the master seed and never on thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the consumer named `label`.
pub fn sub_seed(master: u64, label: &str) -> u64 {
    let h = label.bytes().fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01B3));
    splitmix64(master ^ splitmix64(h))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for chunk `k` of a consumer seeded with `seed`.
pub fn stream(seed: u64, k: u64) -> Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}
