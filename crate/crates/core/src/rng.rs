//! Splittable counter-based random numbers.
//!
//! Every draw is a pure function of `(key, counter)`, where keys are derived
//! by hashing `(seed, index)` pairs. Replicates and steps can therefore be
//! evaluated in any order, on any number of threads, with identical results.
//! The mixing function is the splitmix64 finalizer, applied once per absorbed
//! word.

use crate::stats::normal_quantile;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const LANE_SALT: u64 = 0xd1b5_4a32_d192_ed03;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A keyed stream of random numbers addressed by counter.
///
/// `CounterRng` carries no mutable state; cloning or sharing it across
/// threads is free and draws are independent of evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    /// Root stream for a user-facing seed.
    pub fn new(seed: u64) -> Self {
        CounterRng {
            key: mix64(seed.wrapping_add(GOLDEN)),
        }
    }

    /// Derive an independent child stream (replicate index, schedule noise,
    /// retry attempt, ...).
    #[must_use]
    pub fn split(&self, index: u64) -> Self {
        CounterRng {
            key: mix64(self.key ^ index.wrapping_mul(GOLDEN).wrapping_add(LANE_SALT)),
        }
    }

    /// Raw 64 random bits at position `counter`.
    #[inline]
    pub fn bits(&self, counter: u64) -> u64 {
        mix64(self.key.wrapping_add(counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        // 53 significant bits, offset by half an ulp so 0 and 1 are excluded
        ((self.bits(counter) >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform draw in (-1, 1).
    #[inline]
    pub fn uniform_symmetric(&self, counter: u64) -> f64 {
        2.0 * self.uniform(counter) - 1.0
    }

    /// Standard normal draw via the inverse CDF, one counter per draw.
    #[inline]
    pub fn standard_normal(&self, counter: u64) -> f64 {
        normal_quantile(self.uniform(counter))
    }
}
