//! Reductions of SAME COMPONENT and MULTIPLE BALANCED COMPONENTS to
//! statistical difference, evaluated exactly where feasible.

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::oracle::MixerOracle;
use crate::partition::GroundTruthPartition;
use crate::protocols::check_mbcp_promise;
use crate::stats::trial_rng;

/// Largest `|S| * |Ind|` handled by exact enumeration.
pub const EXACT_SD_LIMIT: u64 = 1 << 22;

fn image_counts(oracle: &MixerOracle, x: u64) -> HashMap<u64, u64> {
    let mut counts = HashMap::new();
    for i in oracle.indices() {
        *counts.entry(oracle.apply(i, x)).or_insert(0) += 1;
    }
    counts
}

/// Total variation between the laws of `M_I(s)` and `M_J(t)`, I, J uniform.
pub fn sd_reduction_scp(oracle: &MixerOracle, s: u64, t: u64) -> Result<f64> {
    for x in [s, t] {
        if !oracle.contains(x) {
            return Err(invalid(format!("{x} is not in S")));
        }
    }
    let (cs, ct) = (image_counts(oracle, s), image_counts(oracle, t));
    let mut diff: u64 = 0;
    for (y, &a) in &cs {
        diff += a.abs_diff(ct.get(y).copied().unwrap_or(0));
    }
    for (y, &b) in &ct {
        if !cs.contains_key(y) {
            diff += b;
        }
    }
    Ok(diff as f64 / (2 * oracle.index_count()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdEstimate {
    pub value: f64,
    pub exact: bool,
    /// Monte Carlo sample count (0 when exact).
    pub samples: u64,
}

/// Total variation between `(a, M_i(a), b, M_j(b))` and four independent
/// uniform elements of S.
///
/// Exact: group the pairs (a, c) by k = #{i : M_i(a) = c}; the tuple law
/// is `k l / (|S|^2 |Ind|^2)`, so the distance is a double sum over the
/// histogram of k. Otherwise estimates `E_U[max(0, 1 - P/U)]` from
/// `samples` uniform tuples.
pub fn sd_reduction_mbcp(
    oracle: &MixerOracle,
    truth: &GroundTruthPartition,
    samples: u64,
    seed: u64,
) -> Result<SdEstimate> {
    check_mbcp_promise(truth)?;
    let s = oracle.element_count();
    let ind = oracle.index_count();
    if s.saturating_mul(ind) <= EXACT_SD_LIMIT {
        let mut hist: HashMap<u64, u128> = HashMap::new();
        let mut nonzero: u128 = 0;
        for a in oracle.elements() {
            for (_, k) in image_counts(oracle, a) {
                *hist.entry(k).or_insert(0) += 1;
                nonzero += 1;
            }
        }
        let (s, ind) = (s as u128, ind as u128);
        hist.insert(0, s * s - nonzero);
        let mut num: u128 = 0;
        for (&k, &hk) in &hist {
            for (&l, &hl) in &hist {
                num += hk * hl * (k as u128 * l as u128 * s * s).abs_diff(ind * ind);
            }
        }
        let den = 2 * s * s * s * s * ind * ind;
        return Ok(SdEstimate { value: num as f64 / den as f64, exact: true, samples: 0 });
    }
    if samples == 0 {
        return Err(invalid("instance too large for exact enumeration and no samples requested"));
    }
    let members = truth.members();
    let mut rng = trial_rng(seed, 0);
    let mut acc = 0.0;
    let scale = s as f64 / ind as f64;
    for _ in 0..samples {
        let mut pick = || members[rng.random_range(0..members.len())];
        let (a, c, b, d) = (pick(), pick(), pick(), pick());
        let k = oracle.indices().filter(|&i| oracle.apply(i, a) == c).count() as f64;
        let l = oracle.indices().filter(|&i| oracle.apply(i, b) == d).count() as f64;
        acc += (1.0 - k * scale * l * scale).max(0.0);
    }
    Ok(SdEstimate { value: acc / samples as f64, exact: false, samples })
}

/// Probability two independent uniform elements of S share a component.
pub fn same_component_probability(truth: &GroundTruthPartition) -> f64 {
    let total = truth.members().len() as f64;
    truth.component_sizes().iter().map(|&m| (m as f64 / total).powi(2)).sum()
}

/// Probability that both pairs of four independent uniform samples share a
/// component.
pub fn predicate_probability(truth: &GroundTruthPartition) -> f64 {
    same_component_probability(truth).powi(2)
}
