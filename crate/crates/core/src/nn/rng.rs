//! Seeded, splittable random streams.
//!
//! All randomness in the crate flows through [`RngStream`]: weight
//! initialization, dropout masks, data shuffling and synthetic fixtures.
//! The generator is ChaCha20, which produces the same byte stream on every
//! platform, and sub-streams are derived by hashing a label into a fresh
//! seed so independent consumers (one per epoch, one per grid point, ...)
//! never share state.
//!
//! Uniform and normal draws are built directly on `next_u64` rather than on
//! distribution helpers, so the emitted sequence is pinned by this crate and
//! cannot drift with dependency upgrades.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::scalar::Scalar;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x100_0000_01b3;

/// FNV-1a over arbitrary bytes; used to fold labels and indices into seeds.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Deterministic seed for a named sub-computation of a base seed.
pub fn derive_seed(base: u64, label: &str) -> u64 {
    let mut bytes = base.to_le_bytes().to_vec();
    bytes.extend_from_slice(label.as_bytes());
    fnv1a(&bytes)
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream for a named sub-task; does not advance `self`.
    pub fn derive(&self, label: &str) -> RngStream {
        RngStream::new(derive_seed(self.seed, label))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform<S: Scalar>(&mut self, lo: f64, hi: f64) -> S {
        S::from_f64(lo + (hi - lo) * self.next_f64())
    }

    /// Box-Muller transform; consumes exactly two uniform draws.
    pub fn normal<S: Scalar>(&mut self, mean: f64, std: f64) -> S {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        S::from_f64(mean + std * z)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform index in `[0, bound)`. Modulo bias is below 2^-50 for any
    /// bound this crate uses.
    pub fn index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        (self.next_u64() % bound as u64) as usize
    }

    /// Fisher-Yates shuffle driven by `index`.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.index(i + 1);
            xs.swap(i, j);
        }
    }
}
