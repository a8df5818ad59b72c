//! Deterministic random streams.
//!
//! All randomness in the crate flows through [`Rng`], a xoshiro256** generator
//! seeded from a `u64` via SplitMix64 (the reference seeding procedure). Integer
//! ranges use bitmask rejection on the high bits and floats take the top 53
//! bits, so every stream is bit-identical across platforms.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256StarStar};

#[derive(Debug, Clone)]
pub struct Rng(Xoshiro256StarStar);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `lo..=hi` without modulo bias.
    pub fn uniform_int(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        let span = hi - lo;
        if span == u64::MAX {
            return self.next_u64();
        }
        let bits = 64 - span.leading_zeros();
        if bits == 0 {
            return lo;
        }
        loop {
            let x = self.next_u64() >> (64 - bits);
            if x <= span {
                return lo + x;
            }
        }
    }

    /// Uniform float in `[0, 1)` with 53 random bits.
    pub fn uniform_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform_f64()
    }
}

/// Mixes a base seed with a path of integers into an independent child seed.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    let mut state = base;
    for &p in path {
        let mut sm = SplitMix64::seed_from_u64(state ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        state = sm.next_u64();
    }
    state
}
