//! JSON instance descriptions.
//!
//! ```json
//! {"family": "offset", "n": 3, "sizes": [4, 4]}
//! {"family": "graphiso", "vertices": 3}
//! {"family": "coset", "modulus": 8, "generators": [2]}
//! {"family": "grover", "n": 4, "marked": 5}
//! {"family": "layered", "base": {...}, "s": 0, "variant": "row0", "hide": true, "seed": 7}
//! ```

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, MixError, Result};
use crate::instances::{
    make_coset_mixer, make_graph_iso_mixer, make_grover_mixer, make_layered_instance, make_offset_mixer, Hiding,
    GroverStep, LayeredInstance, LayeredVariant, PointFunction,
};
use crate::oracle::{LabelOracle, MixerOracle};
use crate::partition::GroundTruthPartition;

/// Marked point of a Grover instance: absent for g = 0, an integer, or
/// `"random"` (drawn from the instance seed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Marked {
    At(u64),
    Random(RandomTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RandomTag {
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VariantSpec {
    Row0,
    Nowhere,
    Row(u64),
    /// Point function over rows; `null` means g = 0.
    Grover(Option<Marked>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum InstanceSpec {
    Offset {
        n: u32,
        /// Explicit components as integers.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        components: Option<Vec<Vec<u64>>>,
        /// Component sizes; members are assigned consecutively from 0.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sizes: Option<Vec<u64>>,
        #[serde(default)]
        seed: u64,
    },
    Graphiso {
        vertices: usize,
        #[serde(default)]
        seed: u64,
    },
    Coset {
        modulus: u64,
        #[serde(default)]
        generators: Vec<u64>,
        #[serde(default)]
        seed: u64,
    },
    Grover {
        n: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        marked: Option<Marked>,
        #[serde(default)]
        step: GroverStep,
        #[serde(default)]
        seed: u64,
    },
    Layered {
        base: Box<InstanceSpec>,
        s: u64,
        variant: VariantSpec,
        #[serde(default)]
        hide: bool,
        #[serde(default)]
        seed: u64,
    },
}

/// A constructed instance with its ground truth.
#[derive(Debug, Clone)]
pub struct BuiltInstance {
    pub spec: InstanceSpec,
    pub oracle: MixerOracle,
    pub truth: Arc<GroundTruthPartition>,
    pub label: Option<LabelOracle>,
    pub layered: Option<LayeredInstance>,
}

fn point(n: u32, marked: &Option<Marked>, rng: &mut ChaCha8Rng) -> Result<PointFunction> {
    match marked {
        None => Ok(PointFunction::zero(n)),
        Some(Marked::At(y)) => PointFunction::point(n, *y),
        Some(Marked::Random(_)) => PointFunction::point(n, rng.random_range(0..1u64 << n)),
    }
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| MixError::Config(e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        match self {
            InstanceSpec::Offset { seed, .. }
            | InstanceSpec::Graphiso { seed, .. }
            | InstanceSpec::Coset { seed, .. }
            | InstanceSpec::Grover { seed, .. }
            | InstanceSpec::Layered { seed, .. } => *seed,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            InstanceSpec::Offset { .. } => "offset",
            InstanceSpec::Graphiso { .. } => "graphiso",
            InstanceSpec::Coset { .. } => "coset",
            InstanceSpec::Grover { .. } => "grover",
            InstanceSpec::Layered { .. } => "layered",
        }
    }

    pub fn build(&self) -> Result<BuiltInstance> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed());
        let plain = |oracle: MixerOracle, truth: GroundTruthPartition| BuiltInstance {
            spec: self.clone(),
            oracle,
            truth: Arc::new(truth),
            label: None,
            layered: None,
        };
        match self {
            InstanceSpec::Offset { n, components, sizes, .. } => {
                let comps = match (components, sizes) {
                    (Some(c), None) => c.clone(),
                    (None, Some(sizes)) => {
                        let mut next = 0u64;
                        sizes
                            .iter()
                            .map(|&m| {
                                let c: Vec<u64> = (next..next + m).collect();
                                next += m;
                                c
                            })
                            .collect()
                    }
                    _ => return Err(MixError::Config("offset needs exactly one of components, sizes".into())),
                };
                let truth = GroundTruthPartition::from_components(*n, comps)?;
                Ok(plain(make_offset_mixer(&truth)?, truth))
            }
            InstanceSpec::Graphiso { vertices, .. } => {
                let (m, t) = make_graph_iso_mixer(*vertices)?;
                Ok(plain(m, t))
            }
            InstanceSpec::Coset { modulus, generators, .. } => {
                let (m, t) = make_coset_mixer(*modulus, generators)?;
                Ok(plain(m, t))
            }
            InstanceSpec::Grover { n, marked, step, .. } => {
                let (m, t) = make_grover_mixer(point(*n, marked, &mut rng)?, *step)?;
                Ok(plain(m, t))
            }
            InstanceSpec::Layered { base, s, variant, hide, .. } => {
                if matches!(**base, InstanceSpec::Layered { .. }) {
                    return Err(invalid("layered instances need a non-layered base"));
                }
                let b = base.build()?;
                let n = b.truth.n();
                let variant = match variant {
                    VariantSpec::Row0 => LayeredVariant::Row0,
                    VariantSpec::Nowhere => LayeredVariant::Nowhere,
                    VariantSpec::Row(j) => LayeredVariant::Row(*j),
                    VariantSpec::Grover(m) => LayeredVariant::Grover(point(n, m, &mut rng)?),
                };
                let mut inst = make_layered_instance(&b.oracle, &b.truth, *s, variant)?;
                if *hide {
                    inst = inst.hide_with(&Hiding::random(2 * n, &mut rng))?;
                }
                Ok(BuiltInstance {
                    spec: self.clone(),
                    oracle: inst.mixer().clone(),
                    truth: Arc::new(inst.truth().clone()),
                    label: Some(inst.label().clone()),
                    layered: Some(inst),
                })
            }
        }
    }
}
