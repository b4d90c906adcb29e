//! Layered 2n-bit instances built from an n-bit base mixer.
//!
//! A 2n-bit string is a pair `(r, z)` with `r` the high n bits (the row) and
//! `z` the low n bits (the column). `S_1` is the base component containing
//! the start column `s`. Each variant marks a set of "active" cells; the
//! mixer moves `z` inside its base component on active cells and fixes
//! everything else, and the label sends every active cell to one merged
//! label and every other cell to itself.
//!
//! | variant   | active cells                                        |
//! |-----------|-----------------------------------------------------|
//! | `Row0`    | `r = 0`                                             |
//! | `Row(j)`  | `r = 0, z in S_1` and `r = j, z not in S_1`         |
//! | `Nowhere` | `r = 0, z in S_1`                                   |
//! | `Grover`  | `r = 0, z in S_1` and `g(r) = 1, z not in S_1`      |
//!
//! Garbage columns (`z` outside the base S) move among themselves through an
//! extra offset field appended to the base index, so `{r} x G` is a single
//! exactly-mixed component wherever it is active.
//!
//! The merged label is `(0, s)`, the label every cell of `{0} x S_1` carries.
//! Choosing the start cell (rather than `(0, 0)`) keeps the merged label
//! from colliding with the identity label of `(0, 0)` when `0^n` is not in
//! `S_1`.

use std::hash::Hash;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::bits::{format_bits, width_for, MAX_WIDTH};
use crate::error::{invalid, MixError, Result};
use crate::instances::grover::PointFunction;
use crate::oracle::{LabelOracle, Labeling, Mixer, MixerOracle, Mode, OracleCost};
use crate::partition::{GroundTruthPartition, MAX_TRUTH_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LayeredVariant {
    Row0,
    Row(u64),
    Nowhere,
    Grover(PointFunction),
}

#[derive(Debug)]
struct Embedding {
    n: u32,
    s: u64,
    base: MixerOracle,
    truth: Arc<GroundTruthPartition>,
    garbage: Vec<u64>,
    garbage_width: u32,
    variant: LayeredVariant,
}

impl Embedding {
    fn in_s1(&self, z: u64) -> bool {
        self.truth.same_component(z, self.s)
    }

    fn split(&self, x: u64) -> (u64, u64) {
        (x >> self.n, x & ((1u64 << self.n) - 1))
    }

    fn join(&self, r: u64, z: u64) -> u64 {
        (r << self.n) | z
    }

    fn garbage_slots(&self) -> u64 {
        self.garbage.len().max(1) as u64
    }

    fn active(&self, r: u64, z: u64) -> bool {
        match self.variant {
            LayeredVariant::Row0 => r == 0,
            LayeredVariant::Row(j) => (r == 0 && self.in_s1(z)) || (r == j && !self.in_s1(z)),
            LayeredVariant::Nowhere => r == 0 && self.in_s1(z),
            LayeredVariant::Grover(g) => (r == 0 && self.in_s1(z)) || (g.eval(r) && !self.in_s1(z)),
        }
    }

    fn merged_label(&self) -> u64 {
        self.join(0, self.s)
    }

    fn move_column(&self, i: u64, z: u64, forward: bool) -> u64 {
        let base_i = i >> self.garbage_width;
        if self.base.contains(z) {
            return if forward {
                self.base.apply(base_i, z)
            } else {
                self.base.apply_inverse(base_i, z)
            };
        }
        let m = self.garbage.len() as u64;
        let k = (i & ((1u64 << self.garbage_width) - 1)) % m;
        let p = self.garbage.binary_search(&z).expect("column is garbage") as u64;
        let to = if forward { (p + k) % m } else { (p + m - k) % m };
        self.garbage[to as usize]
    }

    fn cost(&self, mode: Mode) -> OracleCost {
        let g_queries = match (self.variant, mode) {
            (LayeredVariant::Grover(_), Mode::Classical) => 1,
            (LayeredVariant::Grover(_), Mode::Coherent) => 2,
            _ => 0,
        };
        OracleCost { g_queries, base_queries: 1 }
    }
}

#[derive(Debug)]
pub struct LayeredMixer(Arc<Embedding>);

impl LayeredMixer {
    fn step(&self, i: u64, x: u64, forward: bool) -> u64 {
        let e = &self.0;
        let (r, z) = e.split(x);
        if e.active(r, z) {
            e.join(r, e.move_column(i, z, forward))
        } else {
            x
        }
    }
}

impl Mixer for LayeredMixer {
    fn element_width(&self) -> u32 {
        2 * self.0.n
    }

    fn index_width(&self) -> u32 {
        self.0.base.index_width() + self.0.garbage_width
    }

    fn element_count(&self) -> u64 {
        1u64 << (2 * self.0.n)
    }

    fn element_at(&self, ordinal: u64) -> u64 {
        ordinal
    }

    fn contains(&self, x: u64) -> bool {
        x >> (2 * self.0.n) == 0
    }

    fn index_count(&self) -> u64 {
        self.0.base.index_count() * self.0.garbage_slots()
    }

    fn index_at(&self, ordinal: u64) -> u64 {
        let slots = self.0.garbage_slots();
        let base_i = self.0.base.inner().index_at(ordinal / slots);
        (base_i << self.0.garbage_width) | (ordinal % slots)
    }

    fn index_ordinal(&self, i: u64) -> Option<u64> {
        let e = &self.0;
        let w = self.index_width();
        if w < 64 && i >> w != 0 {
            return None;
        }
        let k = i & ((1u64 << e.garbage_width) - 1);
        if k >= e.garbage_slots() {
            return None;
        }
        let base_ord = e.base.inner().index_ordinal(i >> e.garbage_width)?;
        Some(base_ord * e.garbage_slots() + k)
    }

    fn apply(&self, i: u64, x: u64) -> u64 {
        self.step(i, x, true)
    }

    fn apply_inverse(&self, i: u64, x: u64) -> u64 {
        self.step(i, x, false)
    }

    fn cost(&self, mode: Mode) -> OracleCost {
        self.0.cost(mode)
    }
}

#[derive(Debug)]
pub struct LayeredLabel(Arc<Embedding>);

impl Labeling for LayeredLabel {
    fn input_width(&self) -> u32 {
        2 * self.0.n
    }

    fn output_width(&self) -> u32 {
        2 * self.0.n
    }

    fn label(&self, x: u64) -> u64 {
        let (r, z) = self.0.split(x);
        if self.0.active(r, z) {
            self.0.merged_label()
        } else {
            x
        }
    }

    fn cost(&self, mode: Mode) -> OracleCost {
        self.0.cost(mode)
    }
}

/// Random conjugation `pi` of the element space and relabeling `sigma` of the
/// label space, both stored as explicit tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Hiding {
    pi: Arc<Vec<u64>>,
    pi_inv: Arc<Vec<u64>>,
    sigma: Arc<Vec<u64>>,
    sigma_inv: Arc<Vec<u64>>,
}

fn inverse_table(t: &[u64]) -> Result<Vec<u64>> {
    let mut inv = vec![u64::MAX; t.len()];
    for (x, &y) in t.iter().enumerate() {
        if y as usize >= t.len() || inv[y as usize] != u64::MAX {
            return Err(invalid("table is not a permutation"));
        }
        inv[y as usize] = x as u64;
    }
    Ok(inv)
}

impl Hiding {
    pub fn identity(width: u32) -> Self {
        let t: Arc<Vec<u64>> = Arc::new((0..1u64 << width).collect());
        Hiding { pi: t.clone(), pi_inv: t.clone(), sigma: t.clone(), sigma_inv: t }
    }

    /// Independent uniform permutations of `{0,1}^width`.
    pub fn random<R: Rng + ?Sized>(width: u32, rng: &mut R) -> Self {
        let mut pi: Vec<u64> = (0..1u64 << width).collect();
        pi.shuffle(rng);
        let mut sigma: Vec<u64> = (0..1u64 << width).collect();
        sigma.shuffle(rng);
        Self::from_tables(pi, sigma).expect("shuffles are permutations")
    }

    pub fn from_tables(pi: Vec<u64>, sigma: Vec<u64>) -> Result<Self> {
        if pi.len() != sigma.len() || !pi.len().is_power_of_two() {
            return Err(invalid("hiding tables must cover the same 2^k-element space"));
        }
        let pi_inv = inverse_table(&pi)?;
        let sigma_inv = inverse_table(&sigma)?;
        Ok(Hiding {
            pi: Arc::new(pi),
            pi_inv: Arc::new(pi_inv),
            sigma: Arc::new(sigma),
            sigma_inv: Arc::new(sigma_inv),
        })
    }

    /// `self` after `first`: elements move by `first.pi` then `self.pi`.
    pub fn after(&self, first: &Hiding) -> Hiding {
        let pi = first.pi.iter().map(|&x| self.pi[x as usize]).collect();
        let sigma = first.sigma.iter().map(|&x| self.sigma[x as usize]).collect();
        Self::from_tables(pi, sigma).expect("composition of permutations")
    }

    pub fn pi(&self, x: u64) -> u64 {
        self.pi[x as usize]
    }

    pub fn pi_inv(&self, x: u64) -> u64 {
        self.pi_inv[x as usize]
    }

    pub fn sigma(&self, l: u64) -> u64 {
        self.sigma[l as usize]
    }

    pub fn sigma_inv(&self, l: u64) -> u64 {
        self.sigma_inv[l as usize]
    }

    pub fn pi_table(&self) -> &[u64] {
        &self.pi
    }

    pub fn pi_inv_table(&self) -> &[u64] {
        &self.pi_inv
    }
}

/// `pi . M_i . pi^-1` for every index.
#[derive(Debug)]
pub struct ConjugatedMixer {
    inner: MixerOracle,
    hiding: Hiding,
}

impl Mixer for ConjugatedMixer {
    fn element_width(&self) -> u32 {
        self.inner.n()
    }

    fn index_width(&self) -> u32 {
        self.inner.index_width()
    }

    fn element_count(&self) -> u64 {
        self.inner.element_count()
    }

    fn element_at(&self, ordinal: u64) -> u64 {
        self.hiding.pi(self.inner.inner().element_at(ordinal))
    }

    fn contains(&self, x: u64) -> bool {
        (x as usize) < self.hiding.pi.len() && self.inner.contains(self.hiding.pi_inv(x))
    }

    fn index_count(&self) -> u64 {
        self.inner.index_count()
    }

    fn index_at(&self, ordinal: u64) -> u64 {
        self.inner.inner().index_at(ordinal)
    }

    fn index_ordinal(&self, i: u64) -> Option<u64> {
        self.inner.inner().index_ordinal(i)
    }

    fn apply(&self, i: u64, x: u64) -> u64 {
        self.hiding.pi(self.inner.apply(i, self.hiding.pi_inv(x)))
    }

    fn apply_inverse(&self, i: u64, x: u64) -> u64 {
        self.hiding.pi(self.inner.apply_inverse(i, self.hiding.pi_inv(x)))
    }

    fn cost(&self, mode: Mode) -> OracleCost {
        self.inner.cost(mode)
    }
}

/// `sigma . L . pi^-1`.
#[derive(Debug)]
pub struct RelabeledLabel {
    inner: LabelOracle,
    hiding: Hiding,
}

impl Labeling for RelabeledLabel {
    fn input_width(&self) -> u32 {
        self.inner.input_width()
    }

    fn output_width(&self) -> u32 {
        self.inner.output_width()
    }

    fn label(&self, x: u64) -> u64 {
        self.hiding.sigma(self.inner.label(self.hiding.pi_inv(x)))
    }

    fn cost(&self, mode: Mode) -> OracleCost {
        self.inner.cost(mode)
    }
}

/// A layered instance together with its (possibly hidden) oracles.
#[derive(Debug, Clone)]
pub struct LayeredInstance {
    n: u32,
    s: u64,
    variant: LayeredVariant,
    base: MixerOracle,
    base_truth: Arc<GroundTruthPartition>,
    plain_mixer: MixerOracle,
    plain_label: LabelOracle,
    plain_truth: Arc<GroundTruthPartition>,
    mixer: MixerOracle,
    label: LabelOracle,
    truth: Arc<GroundTruthPartition>,
    label_valid: bool,
    hiding: Option<Hiding>,
    start: u64,
}

#[derive(Hash, PartialEq, Eq)]
enum CellClass {
    Active(u64, usize),
    Alone(u64),
}

pub fn make_layered_instance(
    base: &MixerOracle,
    base_truth: &GroundTruthPartition,
    s: u64,
    variant: LayeredVariant,
) -> Result<LayeredInstance> {
    build_layered(base, Arc::new(base_truth.clone()), s, variant, true)
}

pub(crate) fn build_layered(
    base: &MixerOracle,
    base_truth: Arc<GroundTruthPartition>,
    s: u64,
    variant: LayeredVariant,
    check_label: bool,
) -> Result<LayeredInstance> {
    let n = base_truth.n();
    if base.n() != n {
        return Err(MixError::DimensionMismatch { left: base.n() as usize, right: n as usize });
    }
    if 2 * n > MAX_TRUTH_WIDTH {
        return Err(MixError::TooLarge {
            what: "layered width",
            size: 2 * n as u64,
            limit: MAX_TRUTH_WIDTH as u64,
        });
    }
    if !base_truth.contains(s) {
        return Err(invalid(format!("start column {} is not in S", format_bits(s, n))));
    }
    match variant {
        LayeredVariant::Row(0) => return Err(invalid("row_j needs j != 0; use row0")),
        LayeredVariant::Row(j) if j >> n != 0 => {
            return Err(invalid(format!("row {j} does not fit in {n} bits")))
        }
        LayeredVariant::Grover(g) if g.n() != n => {
            return Err(invalid(format!("point function has width {}, rows have {n}", g.n())))
        }
        _ => {}
    }
    let garbage = base_truth.garbage();
    let garbage_width = width_for(garbage.len() as u64);
    if base.index_width() + garbage_width > MAX_WIDTH {
        return Err(invalid("layered index does not fit in 63 bits"));
    }
    let emb = Arc::new(Embedding {
        n,
        s,
        base: base.clone(),
        truth: base_truth.clone(),
        garbage,
        garbage_width,
        variant,
    });
    let class = |x: u64| {
        let (r, z) = emb.split(x);
        if emb.active(r, z) {
            CellClass::Active(r, emb.truth.component_of(z).unwrap_or(0))
        } else {
            CellClass::Alone(x)
        }
    };
    let plain_truth = Arc::new(GroundTruthPartition::from_classifier(2 * n, 0..1u64 << (2 * n), class)?);
    let plain_mixer = MixerOracle::new(LayeredMixer(emb.clone()));
    let plain_label = LabelOracle::new(LayeredLabel(emb.clone()));
    let label_valid = !check_label || is_label_consistent(&plain_label, &plain_truth);
    Ok(LayeredInstance {
        n,
        s,
        variant,
        base: base.clone(),
        base_truth,
        mixer: plain_mixer.clone(),
        label: plain_label.clone(),
        truth: plain_truth.clone(),
        plain_mixer,
        plain_label,
        plain_truth,
        label_valid,
        hiding: None,
        start: emb.join(0, s),
    })
}

impl LayeredInstance {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Start column `s` in the base.
    pub fn column(&self) -> u64 {
        self.s
    }

    pub fn variant(&self) -> LayeredVariant {
        self.variant
    }

    pub fn base(&self) -> &MixerOracle {
        &self.base
    }

    pub fn base_truth(&self) -> &GroundTruthPartition {
        &self.base_truth
    }

    /// The 2n-bit mixer handed to algorithms (hidden if hiding is set).
    pub fn mixer(&self) -> &MixerOracle {
        &self.mixer
    }

    pub fn label(&self) -> &LabelOracle {
        &self.label
    }

    pub fn truth(&self) -> &GroundTruthPartition {
        &self.truth
    }

    pub fn plain_mixer(&self) -> &MixerOracle {
        &self.plain_mixer
    }

    pub fn plain_label(&self) -> &LabelOracle {
        &self.plain_label
    }

    pub fn plain_truth(&self) -> &GroundTruthPartition {
        &self.plain_truth
    }

    /// Constructor-recorded: whether the label is consistent with the mixer.
    pub fn label_valid(&self) -> bool {
        self.label_valid
    }

    pub fn hiding(&self) -> Option<&Hiding> {
        self.hiding.as_ref()
    }

    /// Start element as seen by algorithms: `pi(0, s)` when hidden.
    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn split(&self, x: u64) -> (u64, u64) {
        (x >> self.n, x & ((1u64 << self.n) - 1))
    }

    /// Applies `hiding` on top of any hiding already present.
    pub fn hide_with(&self, hiding: &Hiding) -> Result<LayeredInstance> {
        if hiding.pi.len() as u64 != 1u64 << (2 * self.n) {
            return Err(invalid("hiding tables do not match the 2n-bit space"));
        }
        let total = match &self.hiding {
            Some(prev) => hiding.after(prev),
            None => hiding.clone(),
        };
        let mixer = MixerOracle::new(ConjugatedMixer { inner: self.plain_mixer.clone(), hiding: total.clone() });
        let label = LabelOracle::new(RelabeledLabel { inner: self.plain_label.clone(), hiding: total.clone() });
        let truth = Arc::new(self.plain_truth.relabel(|x| total.pi(x))?);
        let start = total.pi((0u64 << self.n) | self.s);
        Ok(LayeredInstance {
            mixer,
            label,
            truth,
            hiding: Some(total),
            start,
            ..self.clone()
        })
    }
}

/// Hides an instance behind fresh uniform `pi` and `sigma`.
pub fn hide_instance<R: Rng + ?Sized>(instance: &LayeredInstance, rng: &mut R) -> Result<LayeredInstance> {
    instance.hide_with(&Hiding::random(2 * instance.n(), rng))
}

/// True iff equal labels occur exactly on equal components.
pub fn is_label_consistent(label: &LabelOracle, truth: &GroundTruthPartition) -> bool {
    use std::collections::HashMap;
    let mut comp_of_label: HashMap<u64, usize> = HashMap::new();
    let mut label_of_comp: HashMap<usize, u64> = HashMap::new();
    for &x in truth.members() {
        let l = label.label(x);
        let c = truth.component_of(x).unwrap();
        if *comp_of_label.entry(l).or_insert(c) != c || *label_of_comp.entry(c).or_insert(l) != l {
            return false;
        }
    }
    true
}
