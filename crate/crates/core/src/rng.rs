//! Keyed, counter-style randomness.
//!
//! Every random quantity in the crate is a pure function of a 64-bit seed
//! and a short tuple of integer keys, so results never depend on arrival
//! order, thread scheduling or how many values were drawn before.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes `seed` together with `keys` into a well-mixed 64-bit word.
///
/// Each key is absorbed with a distinct Weyl increment so that
/// `derive(s, &[a, b])` and `derive(s, &[b, a])` are unrelated.
#[inline]
pub fn derive(seed: u64, keys: &[u64]) -> u64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN));
    for (i, &k) in keys.iter().enumerate() {
        let weyl = GOLDEN.wrapping_mul(i as u64 + 2);
        h = mix64(h ^ k.wrapping_add(weyl));
    }
    h
}

/// Maps a 64-bit word to a uniform double in `[0, 1)`.
#[inline]
pub fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A sequential generator for bulk sampling (shuffles, instance generation).
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
