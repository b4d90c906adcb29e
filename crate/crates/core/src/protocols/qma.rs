//! The quantum witness for MULTIPLE COMPONENTS: two component
//! superpositions over distinct components.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::oracle::{MixerOracle, QuerySession};
use crate::partition::GroundTruthPartition;
use crate::protocols::{ProtocolReport, ProtocolTrial};
use crate::quantum::{measure_component_projector, swap_test_registers, QuantumState, Register};
use crate::stats::run_trials;

/// `|S_k1> (x) |S_k2>` on registers A1, A2 (component ids are 1-based).
pub fn build_qma_witness(truth: &GroundTruthPartition, k1: usize, k2: usize) -> Result<QuantumState> {
    let count = truth.component_count();
    if k1 == k2 {
        return Err(invalid("witness components must differ"));
    }
    for k in [k1, k2] {
        if k == 0 || k > count {
            return Err(invalid(format!("component id {k} not in 1..={count}")));
        }
    }
    let n = truth.n();
    let part = |name: &str, k: usize| {
        let support: Vec<usize> = truth.component(k).iter().map(|&x| x as usize).collect();
        QuantumState::uniform(Register::qubits(name, n), &support)
    };
    part("A1", k1)?.tensor(&part("A2", k2)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QmaVerdict {
    pub accept: bool,
    pub first_projection: bool,
    pub second_projection: Option<bool>,
    pub swap_different: Option<bool>,
}

/// Projects each register onto the component-superposition space, then
/// swap-tests them; accepts iff both projections pass and the swap test
/// reports "different".
pub fn qma_verify_mc<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    witness: &QuantumState,
    rng: &mut R,
) -> Result<QmaVerdict> {
    if witness.registers().len() != 2 {
        return Err(invalid("witness must have exactly two element registers"));
    }
    let first = measure_component_projector(session, witness, 0, rng)?;
    if !first.outcome {
        return Ok(QmaVerdict { accept: false, first_projection: false, second_projection: None, swap_different: None });
    }
    let second = measure_component_projector(session, &first.state, 1, rng)?;
    if !second.outcome {
        return Ok(QmaVerdict {
            accept: false,
            first_projection: true,
            second_projection: Some(false),
            swap_different: None,
        });
    }
    let swap = swap_test_registers(&second.state, 0, 1, rng)?;
    Ok(QmaVerdict {
        accept: swap.different,
        first_projection: true,
        second_projection: Some(true),
        swap_different: Some(swap.different),
    })
}

pub fn run_qma_mc(oracle: &MixerOracle, witness: &QuantumState, trials: u64, seed: u64) -> Result<ProtocolReport> {
    let runs = run_trials(trials, seed, |_, rng| {
        let mut session = QuerySession::new(oracle);
        let v = qma_verify_mc(&mut session, witness, rng)?;
        Ok(ProtocolTrial {
            transcript: vec![format!(
                "arthur: projections {} {} swap {}",
                v.first_projection,
                v.second_projection.map_or("-".into(), |b| b.to_string()),
                v.swap_different.map_or("-", |d| if d { "different" } else { "same" }),
            )],
            verdict: v.accept,
            arthur: *session.counts(),
            merlin_evaluations: 0,
        })
    });
    Ok(ProtocolReport::from_trials("qma-mc", runs.into_iter().collect::<Result<Vec<_>>>()?))
}
