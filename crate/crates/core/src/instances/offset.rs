//! Exact synthetic mixers: rotate each component's canonical ordering.
//!
//! An index is a tuple `(k_1, ..., k_c)` with `k_a < |S_a|`, packed with
//! component 1 in the most significant field. `apply` moves a member of
//! `S_a` forward by `k_a` positions (cyclically), so a uniform index sends
//! every element to a uniform member of its component.

use std::sync::Arc;

use crate::bits::{width_for, MAX_WIDTH};
use crate::error::{MixError, Result};
use crate::oracle::{Mixer, MixerOracle};
use crate::partition::GroundTruthPartition;

#[derive(Debug)]
pub struct OffsetMixer {
    truth: Arc<GroundTruthPartition>,
    widths: Vec<u32>,
    shifts: Vec<u32>,
    index_width: u32,
    index_count: u64,
}

impl OffsetMixer {
    pub fn new(truth: Arc<GroundTruthPartition>) -> Result<Self> {
        let sizes = truth.component_sizes();
        let widths: Vec<u32> = sizes.iter().map(|&m| width_for(m as u64)).collect();
        let index_width: u32 = widths.iter().sum();
        if index_width > MAX_WIDTH {
            return Err(MixError::TooLarge {
                what: "offset index width",
                size: index_width as u64,
                limit: MAX_WIDTH as u64,
            });
        }
        let mut shifts = vec![0u32; widths.len()];
        let mut acc = 0;
        for a in (0..widths.len()).rev() {
            shifts[a] = acc;
            acc += widths[a];
        }
        let index_count = sizes
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m as u64))
            .ok_or(MixError::TooLarge { what: "offset index count", size: u64::MAX, limit: u64::MAX })?;
        Ok(OffsetMixer { truth, widths, shifts, index_width, index_count })
    }

    fn field(&self, i: u64, a: usize) -> u64 {
        let w = self.widths[a];
        if w == 0 {
            0
        } else {
            (i >> self.shifts[a]) & ((1u64 << w) - 1)
        }
    }

    /// Offset tuple `(k_1, ..., k_c)` encoded by `i`.
    pub fn offsets(&self, i: u64) -> Vec<u64> {
        (0..self.widths.len()).map(|a| self.field(i, a)).collect()
    }

    /// Packs an offset tuple into an index.
    pub fn encode(&self, offsets: &[u64]) -> u64 {
        offsets
            .iter()
            .enumerate()
            .fold(0, |acc, (a, &k)| acc | (k << self.shifts[a]))
    }

    fn shift(&self, i: u64, x: u64, forward: bool) -> u64 {
        let id = self.truth.component_of(x).expect("offset mixer applied outside S");
        let comp = self.truth.component(id);
        let m = comp.len() as u64;
        let k = self.field(i, id - 1) % m;
        let pos = self.truth.position(x).unwrap() as u64;
        let to = if forward { (pos + k) % m } else { (pos + m - k) % m };
        comp[to as usize]
    }
}

impl Mixer for OffsetMixer {
    fn element_width(&self) -> u32 {
        self.truth.n()
    }

    fn index_width(&self) -> u32 {
        self.index_width
    }

    fn element_count(&self) -> u64 {
        self.truth.members().len() as u64
    }

    fn element_at(&self, ordinal: u64) -> u64 {
        self.truth.members()[ordinal as usize]
    }

    fn contains(&self, x: u64) -> bool {
        self.truth.contains(x)
    }

    fn index_count(&self) -> u64 {
        self.index_count
    }

    fn index_at(&self, mut ordinal: u64) -> u64 {
        let sizes = self.truth.component_sizes();
        let mut offsets = vec![0u64; sizes.len()];
        for a in (0..sizes.len()).rev() {
            let m = sizes[a] as u64;
            offsets[a] = ordinal % m;
            ordinal /= m;
        }
        self.encode(&offsets)
    }

    fn index_ordinal(&self, i: u64) -> Option<u64> {
        if self.index_width < 64 && i >> self.index_width != 0 {
            return None;
        }
        let mut ord = 0u64;
        for (a, comp) in self.truth.components().iter().enumerate() {
            let k = self.field(i, a);
            let m = comp.len() as u64;
            if k >= m {
                return None;
            }
            ord = ord * m + k;
        }
        Some(ord)
    }

    fn apply(&self, i: u64, x: u64) -> u64 {
        self.shift(i, x, true)
    }

    fn apply_inverse(&self, i: u64, x: u64) -> u64 {
        self.shift(i, x, false)
    }
}

/// Offset mixer over an explicit partition.
pub fn make_offset_mixer(truth: &GroundTruthPartition) -> Result<MixerOracle> {
    Ok(MixerOracle::new(OffsetMixer::new(Arc::new(truth.clone()))?))
}
