//! The AM protocol for MULTIPLE BALANCED COMPONENTS.
//!
//! Arthur picks s1, s2 in S, a hidden bit i and an index j, sends
//! (s1, s2, t = M_j(s_i)) and accepts iff Merlin names i.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::oracle::{MixerOracle, QuerySession};
use crate::partition::GroundTruthPartition;
use crate::protocols::{check_mbcp_promise, ProtocolReport, ProtocolTrial};
use crate::stats::run_trials;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Merlin {
    /// Answers i when s1, s2 lie in different components, else guesses.
    Honest,
    /// Maximum-likelihood guess of i from the exact law of t given s_i.
    OptimalCheat,
}

fn hits(oracle: &MixerOracle, s: u64, t: u64) -> u64 {
    oracle.indices().filter(|&j| oracle.apply(j, s) == t).count() as u64
}

fn merlin_answer<R: Rng + ?Sized>(
    merlin: Merlin,
    oracle: &MixerOracle,
    truth: &GroundTruthPartition,
    s: [u64; 2],
    t: u64,
    rng: &mut R,
) -> (u8, u64) {
    match merlin {
        Merlin::Honest => {
            if truth.same_component(s[0], s[1]) {
                (rng.random_range(1..=2), 0)
            } else if truth.same_component(s[0], t) {
                (1, 0)
            } else {
                (2, 0)
            }
        }
        Merlin::OptimalCheat => {
            let (h1, h2) = (hits(oracle, s[0], t), hits(oracle, s[1], t));
            let guess = match h1.cmp(&h2) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => 2,
                std::cmp::Ordering::Equal => rng.random_range(1..=2),
            };
            (guess, 2 * oracle.index_count())
        }
    }
}

fn am_trial<R: Rng + ?Sized>(
    oracle: &MixerOracle,
    truth: &GroundTruthPartition,
    merlin: Merlin,
    rng: &mut R,
) -> Result<ProtocolTrial> {
    let mut session = QuerySession::new(oracle);
    let s1 = session.sample_s(rng)?;
    let s2 = session.sample_s(rng)?;
    let i: u8 = rng.random_range(1..=2);
    let j = session.sample_ind(rng)?;
    let t = session.apply(j, if i == 1 { s1 } else { s2 })?;
    let (answer, merlin_evaluations) = merlin_answer(merlin, oracle, truth, [s1.value(), s2.value()], t.value(), rng);
    let verdict = answer == i;
    Ok(ProtocolTrial {
        transcript: vec![
            format!("arthur: s1={s1} s2={s2} t={t}"),
            format!("merlin: i'={answer}"),
            format!("arthur: i={i} {}", if verdict { "accept" } else { "reject" }),
        ],
        verdict,
        arthur: *session.counts(),
        merlin_evaluations,
    })
}

/// Runs `trials` independent AM rounds. Fails if the instance breaks the
/// MBCP promise.
pub fn run_am_mbcp(
    oracle: &MixerOracle,
    truth: &GroundTruthPartition,
    merlin: Merlin,
    trials: u64,
    seed: u64,
) -> Result<ProtocolReport> {
    check_mbcp_promise(truth)?;
    let runs = run_trials(trials, seed, |_, rng| am_trial(oracle, truth, merlin, rng));
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let name = match merlin {
        Merlin::Honest => "am-mbcp-honest",
        Merlin::OptimalCheat => "am-mbcp-optimal-cheat",
    };
    Ok(ProtocolReport::from_trials(name, runs))
}
