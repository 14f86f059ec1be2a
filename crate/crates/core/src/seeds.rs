//! Deterministic seed derivation and per-frame RNG streams.
//!
//! Every stochastic component takes an explicit `u64` seed. Sub-seeds are
//! derived with splitmix64 so that independent pipeline stages (graph
//! generation, per-frame traffic, per-(lambda, q) evaluations) consume
//! disjoint, reproducible streams regardless of execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the stream generator recorded in trace metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

/// splitmix64 finalizer; full-period mixing of a 64-bit counter.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Mix a base seed with a sequence of labels into one sub-seed.
pub fn derive(base: u64, labels: &[u64]) -> u64 {
    let mut state = splitmix64(base);
    for &label in labels {
        state = splitmix64(state ^ label);
    }
    state
}

/// RNG seeded directly from a u64.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for one simulation frame. Frames share the key and
/// differ only in the ChaCha stream index, so any subset of frames can be
/// generated in any order with identical results.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(frame);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn derive_is_stable_and_label_sensitive() {
        assert_eq!(derive(7, &[1, 2]), derive(7, &[1, 2]));
        assert_ne!(derive(7, &[1, 2]), derive(7, &[2, 1]));
        assert_ne!(derive(7, &[1]), derive(8, &[1]));
    }

    #[test]
    fn frame_streams_are_independent_and_reproducible() {
        let a: Vec<u64> = (0..4).map(|f| frame_rng(42, f).next_u64()).collect();
        let b: Vec<u64> = (0..4).map(|f| frame_rng(42, f).next_u64()).collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }
}
