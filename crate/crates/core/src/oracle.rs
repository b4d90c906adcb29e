//! Black-box query access to a component mixer and a labeling function.
//!
//! Concrete families implement [`Mixer`] / [`Labeling`]. Oracles are
//! immutable and shareable; every query an algorithm makes goes through a
//! [`QuerySession`], which owns the counters for one trial.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::bits::Bits;
use crate::error::{invalid, MixError, Result};

/// Whether an oracle evaluation happens on a classical input or coherently
/// inside a quantum circuit. Only the g-query accounting differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Coherent,
}

/// Side costs of one evaluation that are metered apart from the query itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OracleCost {
    /// Queries to an embedded point function g.
    pub g_queries: u64,
    /// Privileged evaluations of an underlying base mixer.
    pub base_queries: u64,
}

/// An indexed family of bijections on a set S of n-bit strings.
///
/// Elements and indices are passed as raw integers; callers going through a
/// [`QuerySession`] get width and membership checks. `apply` and
/// `apply_inverse` may assume `is_index(i)` and `contains(x)`.
pub trait Mixer: Send + Sync + fmt::Debug {
    fn element_width(&self) -> u32;
    fn index_width(&self) -> u32;

    /// |S|.
    fn element_count(&self) -> u64;
    /// Canonical enumeration of S.
    fn element_at(&self, ordinal: u64) -> u64;
    fn contains(&self, x: u64) -> bool;

    /// |Ind_M|.
    fn index_count(&self) -> u64;
    /// Canonical enumeration of Ind_M. Ordinal 0 is always an identity index.
    fn index_at(&self, ordinal: u64) -> u64;
    /// Rank of `i` in the canonical enumeration, `None` if `i` is not an index.
    fn index_ordinal(&self, i: u64) -> Option<u64>;

    fn apply(&self, i: u64, x: u64) -> u64;
    fn apply_inverse(&self, i: u64, x: u64) -> u64;

    fn cost(&self, _mode: Mode) -> OracleCost {
        OracleCost::default()
    }
}

/// A function assigning a label to every element of the domain.
pub trait Labeling: Send + Sync + fmt::Debug {
    fn input_width(&self) -> u32;
    fn output_width(&self) -> u32;
    fn label(&self, x: u64) -> u64;

    fn cost(&self, _mode: Mode) -> OracleCost {
        OracleCost::default()
    }
}

#[derive(Debug, Clone)]
pub struct MixerOracle(Arc<dyn Mixer>);

impl MixerOracle {
    pub fn new(mixer: impl Mixer + 'static) -> Self {
        MixerOracle(Arc::new(mixer))
    }

    pub fn from_arc(mixer: Arc<dyn Mixer>) -> Self {
        MixerOracle(mixer)
    }

    pub fn inner(&self) -> &Arc<dyn Mixer> {
        &self.0
    }

    pub fn n(&self) -> u32 {
        self.0.element_width()
    }

    pub fn index_width(&self) -> u32 {
        self.0.index_width()
    }

    pub fn element_count(&self) -> u64 {
        self.0.element_count()
    }

    pub fn index_count(&self) -> u64 {
        self.0.index_count()
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.0.element_count()).map(move |k| self.0.element_at(k))
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.0.index_count()).map(move |k| self.0.index_at(k))
    }

    pub fn identity_index(&self) -> u64 {
        self.0.index_at(0)
    }

    pub fn is_index(&self, i: u64) -> bool {
        self.0.index_ordinal(i).is_some()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.contains(x)
    }

    /// Unmetered evaluation for constructors, verifiers and provers.
    pub fn apply(&self, i: u64, x: u64) -> u64 {
        self.0.apply(i, x)
    }

    pub fn apply_inverse(&self, i: u64, x: u64) -> u64 {
        self.0.apply_inverse(i, x)
    }

    pub fn cost(&self, mode: Mode) -> OracleCost {
        self.0.cost(mode)
    }
}

#[derive(Debug, Clone)]
pub struct LabelOracle(Arc<dyn Labeling>);

impl LabelOracle {
    pub fn new(label: impl Labeling + 'static) -> Self {
        LabelOracle(Arc::new(label))
    }

    pub fn from_arc(label: Arc<dyn Labeling>) -> Self {
        LabelOracle(label)
    }

    pub fn inner(&self) -> &Arc<dyn Labeling> {
        &self.0
    }

    pub fn input_width(&self) -> u32 {
        self.0.input_width()
    }

    pub fn output_width(&self) -> u32 {
        self.0.output_width()
    }

    /// Unmetered evaluation.
    pub fn label(&self, x: u64) -> u64 {
        self.0.label(x)
    }

    pub fn cost(&self, mode: Mode) -> OracleCost {
        self.0.cost(mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    MembershipS,
    SampleS,
    MembershipInd,
    SampleInd,
    Apply,
    ApplyInverse,
    PrepareS,
    ProjectS,
    PrepareInd,
    ProjectInd,
    ControlledM,
    Label,
}

/// Per-session query tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounts {
    pub membership_s: u64,
    pub sample_s: u64,
    pub membership_ind: u64,
    pub sample_ind: u64,
    pub apply: u64,
    pub apply_inverse: u64,
    pub prepare_s: u64,
    pub project_s: u64,
    pub prepare_ind: u64,
    pub project_ind: u64,
    pub controlled_m: u64,
    pub label: u64,
    pub g_queries: u64,
    pub base_queries: u64,
}

impl QueryCounts {
    /// The six classical mixer queries.
    pub fn classical(&self) -> u64 {
        self.membership_s
            + self.sample_s
            + self.membership_ind
            + self.sample_ind
            + self.apply
            + self.apply_inverse
    }

    pub fn quantum(&self) -> u64 {
        self.prepare_s + self.project_s + self.prepare_ind + self.project_ind + self.controlled_m
    }

    /// Everything that counts against a session budget.
    pub fn total(&self) -> u64 {
        self.classical() + self.quantum() + self.label
    }

    /// Evaluations of the mixer or label that touch an embedded function.
    pub fn evaluations(&self) -> u64 {
        self.apply + self.apply_inverse + self.controlled_m + self.label
    }

    fn slot(&mut self, kind: QueryKind) -> &mut u64 {
        match kind {
            QueryKind::MembershipS => &mut self.membership_s,
            QueryKind::SampleS => &mut self.sample_s,
            QueryKind::MembershipInd => &mut self.membership_ind,
            QueryKind::SampleInd => &mut self.sample_ind,
            QueryKind::Apply => &mut self.apply,
            QueryKind::ApplyInverse => &mut self.apply_inverse,
            QueryKind::PrepareS => &mut self.prepare_s,
            QueryKind::ProjectS => &mut self.project_s,
            QueryKind::PrepareInd => &mut self.prepare_ind,
            QueryKind::ProjectInd => &mut self.project_ind,
            QueryKind::ControlledM => &mut self.controlled_m,
            QueryKind::Label => &mut self.label,
        }
    }

    pub fn add(&mut self, other: &QueryCounts) {
        self.membership_s += other.membership_s;
        self.sample_s += other.sample_s;
        self.membership_ind += other.membership_ind;
        self.sample_ind += other.sample_ind;
        self.apply += other.apply;
        self.apply_inverse += other.apply_inverse;
        self.prepare_s += other.prepare_s;
        self.project_s += other.project_s;
        self.prepare_ind += other.prepare_ind;
        self.project_ind += other.project_ind;
        self.controlled_m += other.controlled_m;
        self.label += other.label;
        self.g_queries += other.g_queries;
        self.base_queries += other.base_queries;
    }

    pub fn max(&self, other: &QueryCounts) -> QueryCounts {
        QueryCounts {
            membership_s: self.membership_s.max(other.membership_s),
            sample_s: self.sample_s.max(other.sample_s),
            membership_ind: self.membership_ind.max(other.membership_ind),
            sample_ind: self.sample_ind.max(other.sample_ind),
            apply: self.apply.max(other.apply),
            apply_inverse: self.apply_inverse.max(other.apply_inverse),
            prepare_s: self.prepare_s.max(other.prepare_s),
            project_s: self.project_s.max(other.project_s),
            prepare_ind: self.prepare_ind.max(other.prepare_ind),
            project_ind: self.project_ind.max(other.project_ind),
            controlled_m: self.controlled_m.max(other.controlled_m),
            label: self.label.max(other.label),
            g_queries: self.g_queries.max(other.g_queries),
            base_queries: self.base_queries.max(other.base_queries),
        }
    }
}

/// One observed oracle interaction. Sampling answers are recorded too.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranscriptEntry {
    pub kind: QueryKind,
    pub args: Vec<u64>,
    pub answer: u64,
}

/// Metered access to one mixer (and optionally one label) for one trial.
///
/// Not `Sync`-shared: each concurrent trial opens its own session.
#[derive(Debug)]
pub struct QuerySession<'a> {
    mixer: &'a MixerOracle,
    label: Option<&'a LabelOracle>,
    mode: Mode,
    counts: QueryCounts,
    budget: Option<u64>,
    transcript: Option<Vec<TranscriptEntry>>,
}

impl<'a> QuerySession<'a> {
    pub fn new(mixer: &'a MixerOracle) -> Self {
        QuerySession {
            mixer,
            label: None,
            mode: Mode::Classical,
            counts: QueryCounts::default(),
            budget: None,
            transcript: None,
        }
    }

    pub fn with_label(mut self, label: &'a LabelOracle) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_budget(mut self, budget: Option<u64>) -> Self {
        self.budget = budget;
        self
    }

    pub fn recording(mut self) -> Self {
        self.transcript = Some(Vec::new());
        self
    }

    pub fn counts(&self) -> &QueryCounts {
        &self.counts
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        self.transcript.as_deref().unwrap_or(&[])
    }

    /// n, known to every algorithm with query access.
    pub fn element_width(&self) -> u32 {
        self.mixer.n()
    }

    /// Bits needed to encode an index, known to every algorithm.
    pub fn index_width(&self) -> u32 {
        self.mixer.index_width()
    }

    pub fn label_width(&self) -> Option<u32> {
        self.label.map(LabelOracle::input_width)
    }

    pub(crate) fn oracle(&self) -> &'a MixerOracle {
        self.mixer
    }

    /// Counts one query of `kind` plus the mixer's side costs when `kind`
    /// evaluates the mixer.
    pub(crate) fn charge(&mut self, kind: QueryKind) -> Result<()> {
        if let Some(budget) = self.budget {
            if self.counts.total() >= budget {
                return Err(MixError::BudgetExhausted { budget });
            }
        }
        *self.counts.slot(kind) += 1;
        let side = match kind {
            QueryKind::Apply | QueryKind::ApplyInverse => self.mixer.cost(self.mode),
            QueryKind::ControlledM => self.mixer.cost(Mode::Coherent),
            QueryKind::Label => self.label.map(|l| l.cost(self.mode)).unwrap_or_default(),
            _ => OracleCost::default(),
        };
        self.counts.g_queries += side.g_queries;
        self.counts.base_queries += side.base_queries;
        Ok(())
    }

    fn record(&mut self, kind: QueryKind, args: &[u64], answer: u64) {
        if let Some(t) = self.transcript.as_mut() {
            t.push(TranscriptEntry { kind, args: args.to_vec(), answer });
        }
    }

    fn check_element(&self, x: &Bits) -> Result<()> {
        let n = self.mixer.n();
        if x.width() != n {
            return Err(MixError::MalformedQuery { expected: n, got: x.width() });
        }
        Ok(())
    }

    fn check_index(&self, i: &Bits) -> Result<()> {
        let w = self.mixer.index_width();
        if i.width() != w {
            return Err(MixError::MalformedQuery { expected: w, got: i.width() });
        }
        Ok(())
    }

    pub fn test_membership_s(&mut self, x: Bits) -> Result<bool> {
        self.check_element(&x)?;
        self.charge(QueryKind::MembershipS)?;
        let ans = self.mixer.contains(x.value());
        self.record(QueryKind::MembershipS, &[x.value()], ans as u64);
        Ok(ans)
    }

    pub fn sample_s<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Bits> {
        self.charge(QueryKind::SampleS)?;
        let m = self.mixer.inner();
        let x = m.element_at(rng.random_range(0..m.element_count()));
        self.record(QueryKind::SampleS, &[], x);
        Ok(Bits::raw(x, self.mixer.n()))
    }

    pub fn test_membership_ind(&mut self, i: Bits) -> Result<bool> {
        self.check_index(&i)?;
        self.charge(QueryKind::MembershipInd)?;
        let ans = self.mixer.is_index(i.value());
        self.record(QueryKind::MembershipInd, &[i.value()], ans as u64);
        Ok(ans)
    }

    pub fn sample_ind<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Bits> {
        self.charge(QueryKind::SampleInd)?;
        let m = self.mixer.inner();
        let i = m.index_at(rng.random_range(0..m.index_count()));
        self.record(QueryKind::SampleInd, &[], i);
        Ok(Bits::raw(i, self.mixer.index_width()))
    }

    fn check_apply_args(&self, i: &Bits, x: &Bits) -> Result<()> {
        self.check_index(i)?;
        self.check_element(x)?;
        if !self.mixer.is_index(i.value()) {
            return Err(invalid(format!("{i} is not a mixer index")));
        }
        if !self.mixer.contains(x.value()) {
            return Err(invalid(format!("{x} is not in S")));
        }
        Ok(())
    }

    pub fn apply(&mut self, i: Bits, x: Bits) -> Result<Bits> {
        self.check_apply_args(&i, &x)?;
        self.charge(QueryKind::Apply)?;
        let y = self.mixer.apply(i.value(), x.value());
        self.record(QueryKind::Apply, &[i.value(), x.value()], y);
        Ok(Bits::raw(y, self.mixer.n()))
    }

    pub fn apply_inverse(&mut self, i: Bits, x: Bits) -> Result<Bits> {
        self.check_apply_args(&i, &x)?;
        self.charge(QueryKind::ApplyInverse)?;
        let y = self.mixer.apply_inverse(i.value(), x.value());
        self.record(QueryKind::ApplyInverse, &[i.value(), x.value()], y);
        Ok(Bits::raw(y, self.mixer.n()))
    }

    pub fn label(&mut self, x: Bits) -> Result<Bits> {
        let label = self
            .label
            .ok_or_else(|| invalid("this session has no labeling function"))?;
        if x.width() != label.input_width() {
            return Err(MixError::MalformedQuery { expected: label.input_width(), got: x.width() });
        }
        self.charge(QueryKind::Label)?;
        let y = label.label(x.value());
        self.record(QueryKind::Label, &[x.value()], y);
        Ok(Bits::raw(y, label.output_width()))
    }

    /// Every valid index, found by testing each string of the declared index
    /// width for membership (2^width queries).
    pub fn enumerate_indices(&mut self) -> Result<Vec<Bits>> {
        let w = self.index_width();
        let mut out = Vec::new();
        for v in 0..1u64 << w {
            let i = Bits::raw(v, w);
            if self.test_membership_ind(i)? {
                out.push(i);
            }
        }
        Ok(out)
    }
}
