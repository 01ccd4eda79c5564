//! Seeded, platform-independent random source.
//!
//! ChaCha8 is a published stream cipher with a fixed output sequence for a
//! given seed. Floats are produced from the top 53 bits of each `u64`, so the
//! stream of uniforms is identical on every host.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Recorded in trace headers so runs can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str = "chacha8-seed_from_u64-u53";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwarmRng(ChaCha8Rng);

impl SwarmRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform draw from `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.0.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform draw from `[lo, hi]`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        (lo + self.uniform() * (hi - lo)).clamp(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SwarmRng::seed_from_u64(7);
        let mut b = SwarmRng::seed_from_u64(7);
        for _ in 0..100 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
    }

    #[test]
    fn uniforms_stay_in_unit_interval() {
        let mut r = SwarmRng::seed_from_u64(1);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn stream_is_pinned() {
        // Regression values; a change here breaks trace reproducibility.
        let mut r = SwarmRng::seed_from_u64(0);
        assert_eq!(r.uniform(), 0.7090754154265618);
        assert_eq!(r.uniform(), 0.46592172228961015);
        assert_eq!(r.uniform(), 0.6991432426747317);
    }
}
