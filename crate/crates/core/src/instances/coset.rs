//! Coset mixers in the cyclic group Z_N.
//!
//! The subgroup H is the closure of the generators under addition; an index
//! is an element `h` of H and `apply(h, x) = x + h mod N`. Components are
//! the cosets `x + H`.

use std::collections::VecDeque;

use crate::bits::width_for;
use crate::error::{invalid, Result};
use crate::oracle::{Mixer, MixerOracle};
use crate::partition::{GroundTruthPartition, MAX_TRUTH_WIDTH};

#[derive(Debug)]
pub struct CosetMixer {
    modulus: u64,
    width: u32,
    subgroup: Vec<u64>,
}

/// Elements of the subgroup generated by `generators`, ascending.
pub fn subgroup_closure(modulus: u64, generators: &[u64]) -> Vec<u64> {
    let mut seen = vec![false; modulus as usize];
    let mut queue = VecDeque::from([0u64]);
    seen[0] = true;
    while let Some(h) = queue.pop_front() {
        for &g in generators {
            let next = (h + g) % modulus;
            if !seen[next as usize] {
                seen[next as usize] = true;
                queue.push_back(next);
            }
        }
    }
    (0..modulus).filter(|&h| seen[h as usize]).collect()
}

impl CosetMixer {
    pub fn new(modulus: u64, generators: &[u64]) -> Result<Self> {
        if modulus == 0 {
            return Err(invalid("modulus must be positive"));
        }
        let width = width_for(modulus).max(1);
        if width > MAX_TRUTH_WIDTH {
            return Err(invalid(format!("modulus {modulus} is beyond desk scale")));
        }
        if let Some(g) = generators.iter().find(|&&g| g >= modulus) {
            return Err(invalid(format!("generator {g} is not in Z_{modulus}")));
        }
        Ok(CosetMixer { modulus, width, subgroup: subgroup_closure(modulus, generators) })
    }

    pub fn subgroup(&self) -> &[u64] {
        &self.subgroup
    }
}

impl Mixer for CosetMixer {
    fn element_width(&self) -> u32 {
        self.width
    }

    fn index_width(&self) -> u32 {
        self.width
    }

    fn element_count(&self) -> u64 {
        self.modulus
    }

    fn element_at(&self, ordinal: u64) -> u64 {
        ordinal
    }

    fn contains(&self, x: u64) -> bool {
        x < self.modulus
    }

    fn index_count(&self) -> u64 {
        self.subgroup.len() as u64
    }

    fn index_at(&self, ordinal: u64) -> u64 {
        self.subgroup[ordinal as usize]
    }

    fn index_ordinal(&self, i: u64) -> Option<u64> {
        self.subgroup.binary_search(&i).ok().map(|k| k as u64)
    }

    fn apply(&self, h: u64, x: u64) -> u64 {
        (x + h) % self.modulus
    }

    fn apply_inverse(&self, h: u64, x: u64) -> u64 {
        (x + self.modulus - h) % self.modulus
    }
}

/// Coset mixer with ground truth. The closure of a subgroup of Z_N is
/// `d Z_N` for its least positive element `d`, so `x mod d` names the coset.
pub fn make_coset_mixer(modulus: u64, generators: &[u64]) -> Result<(MixerOracle, GroundTruthPartition)> {
    let mixer = CosetMixer::new(modulus, generators)?;
    let step = mixer.subgroup.get(1).copied().unwrap_or(modulus);
    let truth = GroundTruthPartition::from_classifier(mixer.width, 0..modulus, |x| x % step)?;
    Ok((MixerOracle::new(mixer), truth))
}
