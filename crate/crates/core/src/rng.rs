//! Counter-based per-trial random streams.
//!
//! Every trial gets its own generator, seeded by
//!
//! ```text
//! z   = master_seed + 0x9E3779B97F4A7C15 * (trial_id + 1)     (wrapping)
//! z   = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z   = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! key = z ^ (z >> 31)
//! ```
//!
//! i.e. the SplitMix64 output function applied to the trial's counter. The key
//! seeds a ChaCha8 stream. Uniform reals come from the top 53 bits of each
//! `u64`, so a given `(master_seed, trial_id)` yields identical draws on every
//! platform and regardless of how trials are scheduled across threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Domain tag for the forecaster's coin flips, kept apart from the source stream.
pub const FORECASTER_DOMAIN: u64 = 0xF0EC_A57E_0000_0001;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial stream key derived from the master seed and the trial counter.
pub fn mix(master_seed: u64, trial_id: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(trial_id.wrapping_add(1))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngPolicy {
    pub master_seed: u64,
}

impl RngPolicy {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn stream(&self, trial_id: u64) -> TrialStream {
        TrialStream::from_key(mix(self.master_seed, trial_id))
    }

    /// An unrelated policy for a different consumer of randomness.
    pub fn derive(&self, domain: u64) -> RngPolicy {
        RngPolicy::new(splitmix64(self.master_seed ^ domain))
    }
}

#[derive(Debug, Clone)]
pub struct TrialStream {
    inner: ChaCha8Rng,
}

impl TrialStream {
    pub fn from_key(key: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(key),
        }
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn coin(&mut self) -> bool {
        self.inner.next_u64() >> 63 == 1
    }
}

impl RngCore for TrialStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_core::Error> {
        self.inner.try_fill_bytes(dest)
    }
}
