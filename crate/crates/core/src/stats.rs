//! Estimates, confidence intervals, and per-trial seeding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// z-value of a two-sided 95% normal interval.
pub const Z95: f64 = 1.96;

/// A Bernoulli rate with its 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatedProbability {
    pub estimate: f64,
    pub successes: u64,
    pub trials: u64,
    pub confidence_halfwidth: f64,
}

impl EstimatedProbability {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        assert!(trials > 0, "an estimate needs at least one trial");
        let p = successes as f64 / trials as f64;
        EstimatedProbability {
            estimate: p,
            successes,
            trials,
            confidence_halfwidth: Z95 * (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    /// `estimate <= bound + k * halfwidth`.
    pub fn at_most(&self, bound: f64, k: f64) -> bool {
        self.estimate <= bound + k * self.confidence_halfwidth
    }

    /// `estimate >= bound - k * halfwidth`.
    pub fn at_least(&self, bound: f64, k: f64) -> bool {
        self.estimate >= bound - k * self.confidence_halfwidth
    }

    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.confidence_halfwidth
    }
}

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The random stream owned by trial `trial` of an experiment seeded `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `f` once per trial, in parallel on the current rayon pool, returning
/// results in trial order. Results do not depend on the thread count.
pub fn run_trials<T, F>(trials: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            f(t, &mut rng)
        })
        .collect()
}
