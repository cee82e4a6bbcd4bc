//! Seeded, counter-based random streams.
//!
//! Every randomized operation in this crate takes an explicit `u64` seed and
//! builds its own ChaCha stream from it, so results are reproducible and
//! independent streams can be derived for parallel work.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stateless splitmix64 step, used to derive well-separated seeds.
pub(crate) fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and two indices (e.g. cell, trial).
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    let x = splitmix64(master ^ splitmix64(a.wrapping_add(0x517c_c1b7_2722_0a95)));
    splitmix64(x ^ splitmix64(b.wrapping_add(0x2545_f491_4f6c_dd1d)))
}

/// Fresh deterministic generator for the given seed.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
