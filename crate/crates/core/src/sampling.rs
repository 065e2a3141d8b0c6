//! Deterministic seeding and pixel subsampling.
//!
//! Every random stream is derived from `(seed, scene id, purpose)` so that
//! results never depend on scheduling or on the order scenes are visited.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// FNV-1a over the parts, folded into the user seed.
pub fn derive_seed(seed: u64, parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for part in parts {
        for &b in *part {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        // separator so ("ab","c") != ("a","bc")
        h ^= 0xff;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn rng_for(seed: u64, parts: &[&[u8]]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, parts))
}

/// Picks at most `budget` items, one uniformly from each of `budget` equal
/// strata of the input order (row-major pixel order gives scanline strata).
/// Inputs no larger than the budget are returned unchanged.
pub fn stratified_subsample<T: Copy>(items: &[T], budget: usize, rng: &mut impl Rng) -> Vec<T> {
    let n = items.len();
    if n <= budget {
        return items.to_vec();
    }
    if budget == 0 {
        return Vec::new();
    }
    (0..budget)
        .map(|k| {
            let lo = k * n / budget;
            let hi = (k + 1) * n / budget;
            items[rng.random_range(lo..hi)]
        })
        .collect()
}
