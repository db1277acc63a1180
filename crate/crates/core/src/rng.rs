//! Seeded randomness.
//!
//! Every random choice in the crate goes through ChaCha20 keyed from a 64-bit
//! seed, and ranges are drawn by rejection so that streams are identical on
//! every platform.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

pub type Rng = ChaCha20Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform draw from `[0, bound)`. `bound` must be non-zero.
pub fn below(rng: &mut Rng, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % bound;
        }
    }
}

/// Uniform draw from `[lo, hi]`.
pub fn between(rng: &mut Rng, lo: u64, hi: u64) -> u64 {
    debug_assert!(lo <= hi);
    lo + below(rng, hi - lo + 1)
}
