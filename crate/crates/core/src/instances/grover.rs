//! Grover embedding: a point function g hidden inside a mixer over Z_{2^n}.
//!
//! With `Ind_M = Z_{2^n}`, the additive rule is
//!
//! ```text
//! M_i(x) = x + i mod 2^n   if g(x) = g(x + i) = 0
//!        = x               otherwise
//! ```
//!
//! which has a single component when g is all zeros and isolates `y` when
//! `g(y) = 1`. Every evaluation reads g twice.
//!
//! Under a point function the additive rule is not injective (both `y - i`
//! and `y - 2i` land on `y - i`), so [`GroverStep::Xor`] is provided as a
//! bijective variant pairing `x` with `x ^ i` under the same blocking rule.

use serde::{Deserialize, Serialize};

use crate::bits::format_bits;
use crate::error::{invalid, Result};
use crate::oracle::{Mixer, MixerOracle, Mode, OracleCost};
use crate::partition::{GroundTruthPartition, MAX_TRUTH_WIDTH};

/// A Boolean function on n-bit strings that is 1 on at most one input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFunction {
    n: u32,
    marked: Option<u64>,
}

impl PointFunction {
    pub fn zero(n: u32) -> Self {
        PointFunction { n, marked: None }
    }

    pub fn point(n: u32, y: u64) -> Result<Self> {
        if n < 64 && y >> n != 0 {
            return Err(invalid(format!("marked point {y} does not fit in {n} bits")));
        }
        Ok(PointFunction { n, marked: Some(y) })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn marked(&self) -> Option<u64> {
        self.marked
    }

    pub fn eval(&self, r: u64) -> bool {
        self.marked == Some(r)
    }
}

impl std::fmt::Display for PointFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.marked {
            Some(y) => write!(f, "point({})", format_bits(y, self.n)),
            None => f.write_str("zero"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroverStep {
    /// `x + i mod 2^n`.
    #[default]
    Additive,
    /// `x ^ i`.
    Xor,
}

#[derive(Debug)]
pub struct GroverMixer {
    g: PointFunction,
    step: GroverStep,
    mask: u64,
}

impl GroverMixer {
    pub fn new(g: PointFunction, step: GroverStep) -> Result<Self> {
        let n = g.n();
        if n == 0 || n > MAX_TRUTH_WIDTH {
            return Err(invalid(format!("grover mixer width {n} outside 1..={MAX_TRUTH_WIDTH}")));
        }
        Ok(GroverMixer { g, step, mask: (1u64 << n) - 1 })
    }

    pub fn point_function(&self) -> PointFunction {
        self.g
    }

    fn step(&self, i: u64, x: u64, forward: bool) -> u64 {
        let y = match (self.step, forward) {
            (GroverStep::Additive, true) => x.wrapping_add(i) & self.mask,
            (GroverStep::Additive, false) => x.wrapping_sub(i) & self.mask,
            (GroverStep::Xor, _) => x ^ i,
        };
        if !self.g.eval(x) && !self.g.eval(y) {
            y
        } else {
            x
        }
    }
}

impl Mixer for GroverMixer {
    fn element_width(&self) -> u32 {
        self.g.n()
    }

    fn index_width(&self) -> u32 {
        self.g.n()
    }

    fn element_count(&self) -> u64 {
        self.mask + 1
    }

    fn element_at(&self, ordinal: u64) -> u64 {
        ordinal
    }

    fn contains(&self, x: u64) -> bool {
        x <= self.mask
    }

    fn index_count(&self) -> u64 {
        self.mask + 1
    }

    fn index_at(&self, ordinal: u64) -> u64 {
        ordinal
    }

    fn index_ordinal(&self, i: u64) -> Option<u64> {
        (i <= self.mask).then_some(i)
    }

    fn apply(&self, i: u64, x: u64) -> u64 {
        self.step(i, x, true)
    }

    fn apply_inverse(&self, i: u64, x: u64) -> u64 {
        self.step(i, x, false)
    }

    fn cost(&self, _mode: Mode) -> OracleCost {
        OracleCost { g_queries: 2, base_queries: 0 }
    }
}

/// Grover mixer with its ground truth: one component when g is all zeros,
/// otherwise `{y}` and everything else.
pub fn make_grover_mixer(g: PointFunction, step: GroverStep) -> Result<(MixerOracle, GroundTruthPartition)> {
    let mixer = GroverMixer::new(g, step)?;
    let n = g.n();
    let truth = GroundTruthPartition::from_classifier(n, 0..1u64 << n, |x| g.eval(x))?;
    Ok((MixerOracle::new(mixer), truth))
}
