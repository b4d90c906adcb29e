//! Interactive proofs for component problems and the statistical-difference
//! reductions.

pub mod am;
pub mod amplify;
pub mod coam;
pub mod qma;
pub mod sd;

pub use am::{run_am_mbcp, Merlin};
pub use amplify::{amplify, and_soundness, hoeffding_tail, threshold_bounds, AmplifiedDecision, ThresholdBounds};
pub use coam::run_coam_mbcp;
pub use qma::{build_qma_witness, qma_verify_mc, run_qma_mc, QmaVerdict};
pub use sd::{
    predicate_probability, same_component_probability, sd_reduction_mbcp, sd_reduction_scp, SdEstimate,
};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{MixError, Result};
use crate::oracle::QueryCounts;
use crate::partition::GroundTruthPartition;
use crate::stats::EstimatedProbability;

/// One run of a protocol: messages in protocol order and Arthur's verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolTrial {
    pub transcript: Vec<String>,
    pub verdict: bool,
    /// Arthur's metered queries.
    pub arthur: QueryCounts,
    /// Unmetered mixer evaluations made by Merlin.
    pub merlin_evaluations: u64,
}

/// Aggregate of many independent trials.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolReport {
    pub protocol: &'static str,
    pub acceptance: EstimatedProbability,
    /// Per-trial maximum of Arthur's queries.
    pub arthur_max: QueryCounts,
    pub arthur_total: QueryCounts,
    pub merlin_evaluations: u64,
    pub first_trial: Option<ProtocolTrial>,
}

impl ProtocolReport {
    pub(crate) fn from_trials(protocol: &'static str, trials: Vec<ProtocolTrial>) -> Self {
        let n = trials.len() as u64;
        let accepted = trials.iter().filter(|t| t.verdict).count() as u64;
        let mut arthur_max = QueryCounts::default();
        let mut arthur_total = QueryCounts::default();
        let mut merlin_evaluations = 0;
        for t in &trials {
            arthur_max = arthur_max.max(&t.arthur);
            arthur_total.add(&t.arthur);
            merlin_evaluations += t.merlin_evaluations;
        }
        ProtocolReport {
            protocol,
            acceptance: EstimatedProbability::from_counts(accepted, n),
            arthur_max,
            arthur_total,
            merlin_evaluations,
            first_trial: trials.into_iter().next(),
        }
    }

    pub fn accept_rate(&self) -> f64 {
        self.acceptance.estimate
    }

    pub fn ci95(&self) -> f64 {
        self.acceptance.confidence_halfwidth
    }

    /// `{protocol, instance, trials, accept_rate, ci95, queries}`.
    pub fn to_json(&self, instance: &Value) -> Value {
        json!({
            "protocol": self.protocol,
            "instance": instance,
            "trials": self.acceptance.trials,
            "accepted": self.acceptance.successes,
            "accept_rate": self.accept_rate(),
            "ci95": self.ci95(),
            "queries": {
                "arthur_per_trial_max": self.arthur_max,
                "arthur_total": self.arthur_total,
                "merlin_evaluations": self.merlin_evaluations,
            },
            "first_trial": self.first_trial,
        })
    }
}

/// Either a single component or no component holding more than half of S.
pub fn check_mbcp_promise(truth: &GroundTruthPartition) -> Result<()> {
    if truth.members().is_empty() {
        return Err(MixError::PromiseViolation("S is empty".into()));
    }
    let total = truth.members().len();
    let largest = truth.component_sizes().into_iter().max().unwrap_or(0);
    if truth.component_count() == 1 || 2 * largest <= total {
        Ok(())
    } else {
        Err(MixError::PromiseViolation(format!(
            "a component holds {largest} of {total} elements but there are {} components",
            truth.component_count()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn promise_cases() {
        let one = GroundTruthPartition::from_components(2, vec![vec![0, 1, 2, 3]]).unwrap();
        let balanced = GroundTruthPartition::from_components(2, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let lopsided = GroundTruthPartition::from_components(2, vec![vec![0, 1, 2], vec![3]]).unwrap();
        assert!(check_mbcp_promise(&one).is_ok());
        assert!(check_mbcp_promise(&balanced).is_ok());
        assert!(matches!(check_mbcp_promise(&lopsided), Err(MixError::PromiseViolation(_))));
    }
}
