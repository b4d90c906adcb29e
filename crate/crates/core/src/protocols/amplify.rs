//! Repetition with threshold or AND voting, and the matching error bounds.

use serde::Serialize;

use crate::error::{invalid, Result};

/// `exp(-2 k gap^2)`: Hoeffding bound on a k-sample mean straying `gap`.
pub fn hoeffding_tail(repetitions: u64, gap: f64) -> f64 {
    (-2.0 * repetitions as f64 * gap * gap).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdBounds {
    /// Probability a yes instance (accept rate >= p_yes) falls below threshold.
    pub completeness_error: f64,
    /// Probability a no instance (accept rate <= p_no) reaches threshold.
    pub soundness_error: f64,
}

/// Error bounds of accepting iff the accept fraction over `repetitions`
/// runs is at least `threshold`, for `p_no < threshold < p_yes`.
pub fn threshold_bounds(repetitions: u64, p_yes: f64, p_no: f64, threshold: f64) -> Result<ThresholdBounds> {
    if repetitions == 0 || !(p_no < threshold && threshold < p_yes) {
        return Err(invalid("need repetitions >= 1 and p_no < threshold < p_yes"));
    }
    Ok(ThresholdBounds {
        completeness_error: hoeffding_tail(repetitions, p_yes - threshold),
        soundness_error: hoeffding_tail(repetitions, threshold - p_no),
    })
}

/// Soundness of ANDing `k` runs of a protocol with soundness `single`.
pub fn and_soundness(single: f64, k: u32) -> f64 {
    single.powi(k as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplifiedDecision {
    pub repetitions: u64,
    pub accepts: u64,
    pub threshold: f64,
    pub accept: bool,
}

/// Runs `run` `repetitions` times and accepts iff at least a `threshold`
/// fraction of runs accept. A threshold of 1 gives AND voting.
pub fn amplify<F>(repetitions: u64, threshold: f64, mut run: F) -> Result<AmplifiedDecision>
where
    F: FnMut(u64) -> Result<bool>,
{
    if repetitions == 0 {
        return Err(invalid("repetitions must be at least 1"));
    }
    let mut accepts = 0;
    for r in 0..repetitions {
        if run(r)? {
            accepts += 1;
        }
    }
    Ok(AmplifiedDecision {
        repetitions,
        accepts,
        threshold,
        accept: accepts as f64 >= threshold * repetitions as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn am_gap_amplified_below_one_third() {
        let b = threshold_bounds(200, 0.75, 0.625, 11.0 / 16.0).unwrap();
        assert!(b.completeness_error < 1.0 / 3.0);
        assert!(b.soundness_error < 1.0 / 3.0);
        assert!((b.soundness_error - (-1.5625f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn single_repetition_is_identity() {
        for v in [true, false] {
            assert_eq!(amplify(1, 0.5, |_| Ok(v)).unwrap().accept, v);
        }
    }

    #[test]
    fn and_voting() {
        assert_eq!(and_soundness(0.5, 10), 1.0 / 1024.0);
        let d = amplify(4, 1.0, |r| Ok(r != 2)).unwrap();
        assert!(!d.accept);
    }
}
