//! Privileged checks of a mixer against the component-mixer definition.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::oracle::MixerOracle;
use crate::partition::GroundTruthPartition;

/// Largest |S| for which instant mixing is computed over every element.
pub const EXACT_TV_LIMIT: u64 = 1 << 12;
/// Elements drawn when |S| exceeds [`EXACT_TV_LIMIT`].
pub const SAMPLED_ELEMENTS: usize = 1024;

/// The instant-mixing threshold `2^-(n+2)`.
pub fn mixing_threshold(n: u32) -> f64 {
    (-(n as f64) - 2.0).exp2()
}

/// True iff every `apply(i, x)` stays in the component of `x`.
pub fn verify_no_cross_mixing(oracle: &MixerOracle, truth: &GroundTruthPartition) -> bool {
    first_cross_mixing(oracle, truth).is_none()
}

/// First `(i, x)` whose image leaves the component of `x`, if any.
pub fn first_cross_mixing(oracle: &MixerOracle, truth: &GroundTruthPartition) -> Option<(u64, u64)> {
    for &x in truth.members() {
        let home = truth.component_of(x);
        for i in oracle.indices() {
            if truth.component_of(oracle.apply(i, x)) != home {
                return Some((i, x));
            }
        }
    }
    None
}

/// First `(i, x)` with `apply_inverse(i, apply(i, x)) != x`, if any.
pub fn first_round_trip_failure(oracle: &MixerOracle) -> Option<(u64, u64)> {
    for x in oracle.elements() {
        for i in oracle.indices() {
            if oracle.apply_inverse(i, oracle.apply(i, x)) != x {
                return Some((i, x));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingReport {
    /// max over checked x of TV(M_I(x), uniform on the component of x).
    pub max_tv: f64,
    pub worst_element: u64,
    /// True when every element of S was checked.
    pub exact: bool,
    pub elements_checked: u64,
    pub threshold: f64,
    pub within_threshold: bool,
}

/// Total variation distance between `M_I(x)` for uniform `I` and the uniform
/// distribution on the component of `x`, computed exactly over Ind_M.
pub fn mixing_distance(oracle: &MixerOracle, truth: &GroundTruthPartition, x: u64) -> f64 {
    let comp = truth
        .component_containing(x)
        .expect("mixing_distance needs a member of S");
    let m = comp.len() as u128;
    let ind = oracle.index_count() as u128;
    let mut counts = std::collections::HashMap::<u64, u128>::new();
    for i in oracle.indices() {
        *counts.entry(oracle.apply(i, x)).or_default() += 1;
    }
    // TV * 2 * m * |Ind|, accumulated exactly.
    let mut num: u128 = 0;
    for &u in comp {
        let c = counts.remove(&u).unwrap_or(0);
        num += (c * m).abs_diff(ind);
    }
    num += counts.values().map(|&c| c * m).sum::<u128>();
    num as f64 / (2 * m * ind) as f64
}

pub fn verify_instant_mixing(oracle: &MixerOracle, truth: &GroundTruthPartition, seed: u64) -> MixingReport {
    let members = truth.members();
    let exact = members.len() as u64 <= EXACT_TV_LIMIT;
    let checked: Vec<u64> = if exact {
        members.to_vec()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample(&mut rng, members.len(), SAMPLED_ELEMENTS)
            .into_iter()
            .map(|k| members[k])
            .collect()
    };
    let mut max_tv = 0.0f64;
    let mut worst = checked[0];
    for &x in &checked {
        let tv = mixing_distance(oracle, truth, x);
        if tv > max_tv {
            max_tv = tv;
            worst = x;
        }
    }
    let threshold = mixing_threshold(truth.n());
    MixingReport {
        max_tv,
        worst_element: worst,
        exact,
        elements_checked: checked.len() as u64,
        threshold,
        within_threshold: max_tv <= threshold,
    }
}

/// Brute-force search for `i` with `apply(i, s) = t`, in canonical index
/// order (so `s = t` yields the identity index).
pub fn full_connectivity_witness(
    oracle: &MixerOracle,
    truth: &GroundTruthPartition,
    s: u64,
    t: u64,
) -> Result<Option<u64>> {
    for (name, v) in [("s", s), ("t", t)] {
        if !truth.contains(v) || !oracle.contains(v) {
            return Err(invalid(format!("{name} is not in S")));
        }
    }
    Ok(oracle.indices().find(|&i| oracle.apply(i, s) == t))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub same_pairs: u64,
    pub same_with_witness: u64,
    pub cross_pairs: u64,
    pub cross_with_witness: u64,
}

impl ConnectivityReport {
    pub fn holds(&self) -> bool {
        self.same_pairs == self.same_with_witness && self.cross_with_witness == 0
    }
}

/// Runs the witness search over every ordered pair of S.
pub fn connectivity_report(oracle: &MixerOracle, truth: &GroundTruthPartition) -> ConnectivityReport {
    let mut report = ConnectivityReport::default();
    let members = truth.members();
    for &s in members {
        let reach: std::collections::HashSet<u64> = oracle.indices().map(|i| oracle.apply(i, s)).collect();
        for &t in members {
            let found = reach.contains(&t);
            if truth.same_component(s, t) {
                report.same_pairs += 1;
                report.same_with_witness += found as u64;
            } else {
                report.cross_pairs += 1;
                report.cross_with_witness += found as u64;
            }
        }
    }
    report
}
