//! The hidden element-to-component map.
//!
//! A `GroundTruthPartition` is a privileged capability: instance constructors,
//! verifiers and unbounded provers hold one, algorithms under test only ever
//! see a [`MixerOracle`](crate::oracle::MixerOracle).

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::bits::{format_bits, Bits};
use crate::error::{invalid, MixError, Result};

/// Largest element width for which we keep a dense lookup table.
pub const MAX_TRUTH_WIDTH: u32 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthPartition {
    n: u32,
    members: Vec<u64>,
    /// Dense over all n-bit strings; 0 marks garbage, otherwise a 1-based id.
    component: Vec<u32>,
    /// Position of each member inside its component's canonical ordering.
    position: Vec<u32>,
    components: Vec<Vec<u64>>,
}

impl GroundTruthPartition {
    /// Builds a partition from explicit component lists. Component `k` of the
    /// input becomes id `k + 1`; each list is sorted into canonical order.
    pub fn from_components(n: u32, components: Vec<Vec<u64>>) -> Result<Self> {
        if n > MAX_TRUTH_WIDTH {
            return Err(MixError::TooLarge {
                what: "partition width",
                size: n as u64,
                limit: MAX_TRUTH_WIDTH as u64,
            });
        }
        if components.is_empty() {
            return Err(invalid("a partition needs at least one component"));
        }
        let universe = 1usize << n;
        let mut component = vec![0u32; universe];
        let mut position = vec![0u32; universe];
        let mut sorted = Vec::with_capacity(components.len());
        for (k, mut comp) in components.into_iter().enumerate() {
            if comp.is_empty() {
                return Err(invalid(format!("component {} is empty", k + 1)));
            }
            comp.sort_unstable();
            for (pos, &x) in comp.iter().enumerate() {
                if x as usize >= universe {
                    return Err(invalid(format!("element {x} does not fit in {n} bits")));
                }
                if component[x as usize] != 0 {
                    return Err(invalid(format!(
                        "element {} appears in more than one component",
                        format_bits(x, n)
                    )));
                }
                component[x as usize] = (k + 1) as u32;
                position[x as usize] = pos as u32;
            }
            sorted.push(comp);
        }
        let members = (0..universe as u64)
            .filter(|&x| component[x as usize] != 0)
            .collect();
        Ok(GroundTruthPartition {
            n,
            members,
            component,
            position,
            components: sorted,
        })
    }

    /// Groups `members` by `key`. Components are numbered in order of their
    /// smallest member.
    pub fn from_classifier<K, F>(n: u32, members: impl IntoIterator<Item = u64>, key: F) -> Result<Self>
    where
        K: Eq + Hash,
        F: Fn(u64) -> K,
    {
        let mut members: Vec<u64> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut components: Vec<Vec<u64>> = Vec::new();
        for x in members {
            let next = components.len();
            let id = *ids.entry(key(x)).or_insert(next);
            if id == components.len() {
                components.push(Vec::new());
            }
            components[id].push(x);
        }
        Self::from_components(n, components)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn contains(&self, x: u64) -> bool {
        self.component_of(x).is_some()
    }

    /// 1-based component id, or `None` for garbage and out-of-range values.
    pub fn component_of(&self, x: u64) -> Option<usize> {
        match self.component.get(x as usize) {
            Some(&id) if id != 0 => Some(id as usize),
            _ => None,
        }
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Members of component `id` (1-based) in canonical order.
    pub fn component(&self, id: usize) -> &[u64] {
        &self.components[id - 1]
    }

    pub fn components(&self) -> &[Vec<u64>] {
        &self.components
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    /// Index of `x` within its component's canonical ordering.
    pub fn position(&self, x: u64) -> Option<usize> {
        self.component_of(x).map(|_| self.position[x as usize] as usize)
    }

    pub fn same_component(&self, a: u64, b: u64) -> bool {
        match (self.component_of(a), self.component_of(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// Members of the component containing `x`.
    pub fn component_containing(&self, x: u64) -> Option<&[u64]> {
        self.component_of(x).map(|id| self.component(id))
    }

    /// `{0,1}^n \ S`, ascending.
    pub fn garbage(&self) -> Vec<u64> {
        (0..1u64 << self.n).filter(|&x| !self.contains(x)).collect()
    }

    /// Largest component share, `max_a |S_a| / |S|`.
    pub fn largest_share(&self) -> f64 {
        let max = self.components.iter().map(Vec::len).max().unwrap_or(0);
        max as f64 / self.members.len() as f64
    }

    /// Pushes every element through the bijection `f` on n-bit strings,
    /// keeping component ids.
    pub fn relabel(&self, f: impl Fn(u64) -> u64) -> Result<Self> {
        let comps = self
            .components
            .iter()
            .map(|c| c.iter().map(|&x| f(x)).collect())
            .collect();
        Self::from_components(self.n, comps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PartitionDoc::from(self)).expect("partition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PartitionDoc =
            serde_json::from_str(text).map_err(|e| MixError::Config(e.to_string()))?;
        doc.try_into()
    }
}

/// Wire form: `{ "n": int, "members": [bits], "component_of": {bits: int} }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub n: u32,
    pub members: Vec<Bits>,
    pub component_of: BTreeMap<Bits, usize>,
}

impl From<&GroundTruthPartition> for PartitionDoc {
    fn from(p: &GroundTruthPartition) -> Self {
        PartitionDoc {
            n: p.n,
            members: p.members.iter().map(|&x| Bits::raw(x, p.n)).collect(),
            component_of: p
                .members
                .iter()
                .map(|&x| (Bits::raw(x, p.n), p.component_of(x).unwrap()))
                .collect(),
        }
    }
}

impl TryFrom<PartitionDoc> for GroundTruthPartition {
    type Error = MixError;

    fn try_from(doc: PartitionDoc) -> Result<Self> {
        let n = doc.n;
        for b in doc.members.iter().chain(doc.component_of.keys()) {
            if b.width() != n {
                return Err(MixError::MalformedQuery { expected: n, got: b.width() });
            }
        }
        let mut members: Vec<u64> = doc.members.iter().map(Bits::value).collect();
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("duplicate member"));
        }
        let keyed: Vec<u64> = doc.component_of.keys().map(Bits::value).collect();
        if keyed != members {
            return Err(invalid("component_of keys must equal members"));
        }
        let c = doc.component_of.values().copied().max().unwrap_or(0);
        let mut comps = vec![Vec::new(); c];
        for (b, &id) in &doc.component_of {
            if id == 0 {
                return Err(invalid("component ids start at 1"));
            }
            comps[id - 1].push(b.value());
        }
        if let Some(k) = comps.iter().position(Vec::is_empty) {
            return Err(invalid(format!("component id {} is unused", k + 1)));
        }
        GroundTruthPartition::from_components(n, comps)
    }
}
