//! Concrete counterfeiters. Both see only metered oracles.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, RngCore};

use crate::bits::Bits;
use crate::error::{invalid, Result};
use crate::oracle::QuerySession;
use crate::quantum::{QuantumState, Register};

/// An algorithm for SIMPLE COUNTERFEITING: given metered mixer and label
/// access and a start element, output a state over the element space.
pub trait Counterfeiter: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    /// Session budget the harness should impose, if any.
    fn budget(&self) -> Option<u64>;

    fn run(&self, session: &mut QuerySession<'_>, start: u64, rng: &mut dyn RngCore) -> Result<QuantumState>;
}

fn uniform_over(width: u32, support: &BTreeSet<u64>) -> Result<QuantumState> {
    let support: Vec<usize> = support.iter().map(|&x| x as usize).collect();
    QuantumState::uniform(Register::qubits("X", width), &support)
}

/// Breadth-first closure of `start` under every index, keeping points whose
/// label matches the start's.
fn closure(session: &mut QuerySession<'_>, start: Bits, start_label: Bits) -> Result<BTreeSet<u64>> {
    let indices = session.enumerate_indices()?;
    let mut seen = BTreeSet::from([start.value()]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &i in &indices {
            let y = session.apply(i, x)?;
            if seen.contains(&y.value()) {
                continue;
            }
            if session.label(y)? == start_label {
                seen.insert(y.value());
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

fn start_bits(session: &QuerySession<'_>, start: u64) -> Result<Bits> {
    Bits::new(start, session.element_width())
}

/// Labels the start, explores its closure under the mixer, and outputs the
/// uniform superposition over it. Only ever queries the label on points it
/// reached from the start.
#[derive(Debug, Clone, Copy)]
pub struct Reference {
    pub budget: u64,
}

pub fn reference_counterfeiter(budget: u64) -> Reference {
    Reference { budget }
}

impl Counterfeiter for Reference {
    fn name(&self) -> String {
        format!("reference(budget={})", self.budget)
    }

    fn budget(&self) -> Option<u64> {
        Some(self.budget)
    }

    fn run(&self, session: &mut QuerySession<'_>, start: u64, _rng: &mut dyn RngCore) -> Result<QuantumState> {
        let start = start_bits(session, start)?;
        let label = session.label(start)?;
        let reached = closure(session, start, label)?;
        uniform_over(session.element_width(), &reached)
    }
}

/// First labels `scan_count` uniformly random points (every point when
/// `scan_count` covers the space), then behaves like [`Reference`]. If a
/// scanned point carries the start's label but lies outside the explored
/// closure, the label has been caught merging components, and the output
/// becomes the superposition over the whole observed label class.
#[derive(Debug, Clone, Copy)]
pub struct LabelScanning {
    pub scan_count: u64,
    pub budget: Option<u64>,
}

pub fn label_scanning_counterfeiter(scan_count: u64) -> LabelScanning {
    LabelScanning { scan_count, budget: None }
}

impl Counterfeiter for LabelScanning {
    fn name(&self) -> String {
        format!("label-scanning(scan={})", self.scan_count)
    }

    fn budget(&self) -> Option<u64> {
        self.budget
    }

    fn run(&self, session: &mut QuerySession<'_>, start: u64, rng: &mut dyn RngCore) -> Result<QuantumState> {
        let width = session.element_width();
        if session.label_width().is_none() {
            return Err(invalid("label-scanning counterfeiter needs a label oracle"));
        }
        let start = start_bits(session, start)?;
        let label = session.label(start)?;
        let space = 1u64 << width;
        let points: Vec<u64> = if self.scan_count >= space {
            (0..space).collect()
        } else {
            (0..self.scan_count).map(|_| rng.random_range(0..space)).collect()
        };
        let mut same_label = BTreeSet::new();
        for p in points {
            if session.label(Bits::new(p, width)?)? == label {
                same_label.insert(p);
            }
        }
        let mut reached = closure(session, start, label)?;
        if same_label.iter().any(|p| !reached.contains(p)) {
            reached.extend(same_label);
        }
        uniform_over(width, &reached)
    }
}
