//! Seeded random streams.
//!
//! Every random draw in the crate comes from a SplitMix64 generator. The
//! algorithm is tiny and fully specified, so another implementation can
//! reproduce the same datasets and fold plans bit for bit:
//!
//! * state advances by the golden-ratio increment `0x9e3779b97f4a7c15`;
//! * output is the standard SplitMix64 finalizer of the new state;
//! * a uniform double in `[0, 1)` is `(next_u64 >> 11) * 2^-53`;
//! * an independent stream `k` under seed `s` starts from state
//!   `mix(s ^ mix(k + 1))`, where `mix` is the same finalizer.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic random stream.
#[derive(Clone, Debug)]
pub struct Stream {
    inner: SplitMix64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    /// Independent sub-stream `id` of `seed`.
    pub fn derive(seed: u64, id: u64) -> Self {
        Self::new(mix64(seed ^ mix64(id.wrapping_add(1))))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform index in `0..n` by scaling a uniform double.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }

    /// Fisher-Yates shuffle, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

/// Seed for a derived stream, for APIs that take a plain seed.
pub fn derive_seed(seed: u64, id: u64) -> u64 {
    mix64(seed ^ mix64(id.wrapping_add(1)))
}
