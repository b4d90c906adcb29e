//! The co-AM protocol for MULTIPLE BALANCED COMPONENTS: Merlin exhibits an
//! index carrying s1 to s2.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::Result;
use crate::oracle::{MixerOracle, QuerySession};
use crate::partition::GroundTruthPartition;
use crate::protocols::{check_mbcp_promise, ProtocolReport, ProtocolTrial};
use crate::stats::run_trials;
use crate::Bits;

fn coam_trial<R: Rng + ?Sized>(oracle: &MixerOracle, rng: &mut R) -> Result<ProtocolTrial> {
    let mut session = QuerySession::new(oracle);
    let s1 = session.sample_s(rng)?;
    let s2 = session.sample_s(rng)?;
    let witnesses: Vec<u64> = oracle.indices().filter(|&i| oracle.apply(i, s1.value()) == s2.value()).collect();
    // With no valid index Merlin still has to send something.
    let i = *witnesses.choose(rng).unwrap_or(&oracle.identity_index());
    let i = Bits::new(i, oracle.index_width())?;
    let verdict = session.apply(i, s1)? == s2;
    Ok(ProtocolTrial {
        transcript: vec![
            format!("arthur: s1={s1} s2={s2}"),
            format!("merlin: i={i}"),
            format!("arthur: {}", if verdict { "accept" } else { "reject" }),
        ],
        verdict,
        arthur: *session.counts(),
        merlin_evaluations: oracle.index_count(),
    })
}

pub fn run_coam_mbcp(
    oracle: &MixerOracle,
    truth: &GroundTruthPartition,
    trials: u64,
    seed: u64,
) -> Result<ProtocolReport> {
    check_mbcp_promise(truth)?;
    let runs = run_trials(trials, seed, |_, rng| coam_trial(oracle, rng));
    Ok(ProtocolReport::from_trials("coam-mbcp", runs.into_iter().collect::<Result<Vec<_>>>()?))
}
