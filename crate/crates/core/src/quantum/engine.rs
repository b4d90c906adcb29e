//! Quantum oracle operations and the component-projector measurement.
//!
//! Element registers have dimension `2^n` and hold strings by value. Index
//! registers have dimension `|Ind|` and hold the ordinal of an index in the
//! mixer's canonical order. The uniform index state is called `e0` below.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, MixError, Result};
use crate::oracle::{MixerOracle, QueryKind, QuerySession};
use crate::partition::GroundTruthPartition;
use crate::quantum::state::{Measurement, QuantumState, Register};
use crate::quantum::MAX_STATE_ENTRIES;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn element_register(oracle: &MixerOracle) -> Result<Register> {
    let n = oracle.n();
    if n >= usize::BITS || (1usize << n) > MAX_STATE_ENTRIES {
        return Err(MixError::TooLarge {
            what: "element register",
            size: 1u64 << n.min(63),
            limit: MAX_STATE_ENTRIES as u64,
        });
    }
    Ok(Register::qubits("A", n))
}

fn index_register(oracle: &MixerOracle) -> Result<Register> {
    let count = oracle.index_count();
    if count > MAX_STATE_ENTRIES as u64 {
        return Err(MixError::TooLarge { what: "index register", size: count, limit: MAX_STATE_ENTRIES as u64 });
    }
    Ok(Register::new("B", count as usize))
}

fn uniform_vector(dim: usize, support: impl Iterator<Item = usize>) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    let mut k = 0usize;
    for x in support {
        v[x] = Complex64::new(1.0, 0.0);
        k += 1;
    }
    let a = 1.0 / (k as f64).sqrt();
    v.iter_mut().for_each(|z| *z *= a);
    v
}

fn s_vector(oracle: &MixerOracle) -> Result<Vec<Complex64>> {
    let dim = element_register(oracle)?.dim;
    Ok(uniform_vector(dim, oracle.elements().map(|x| x as usize)))
}

fn ind_vector(oracle: &MixerOracle) -> Result<Vec<Complex64>> {
    let dim = index_register(oracle)?.dim;
    Ok(uniform_vector(dim, 0..dim))
}

fn check_register(state: &QuantumState, k: usize, dim: usize, what: &str) -> Result<()> {
    match state.registers().get(k) {
        None => Err(invalid(format!("state has no register {k}"))),
        Some(r) if r.dim != dim => Err(invalid(format!(
            "register {} has dimension {}, expected {what} dimension {dim}",
            r.name, r.dim
        ))),
        Some(_) => Ok(()),
    }
}

/// `|S|^{-1/2} sum_{s in S} |s>` on a fresh element register.
pub fn prepare_uniform_s(session: &mut QuerySession<'_>) -> Result<QuantumState> {
    session.charge(QueryKind::PrepareS)?;
    let oracle = session.oracle();
    QuantumState::new(vec![element_register(oracle)?], s_vector(oracle)?)
}

/// Measures the projector onto the uniform-S state on register `k`.
pub fn project_uniform_s<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    state: &QuantumState,
    k: usize,
    rng: &mut R,
) -> Result<Measurement> {
    let oracle = session.oracle();
    check_register(state, k, element_register(oracle)?.dim, "element")?;
    session.charge(QueryKind::ProjectS)?;
    state.measure_rank_one(k, &s_vector(oracle)?, rng)
}

/// The uniform index state `e0` on a fresh index register.
pub fn prepare_uniform_ind(session: &mut QuerySession<'_>) -> Result<QuantumState> {
    session.charge(QueryKind::PrepareInd)?;
    let oracle = session.oracle();
    QuantumState::new(vec![index_register(oracle)?], ind_vector(oracle)?)
}

pub fn project_uniform_ind<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    state: &QuantumState,
    k: usize,
    rng: &mut R,
) -> Result<Measurement> {
    let oracle = session.oracle();
    check_register(state, k, index_register(oracle)?.dim, "index")?;
    session.charge(QueryKind::ProjectInd)?;
    state.measure_rank_one(k, &ind_vector(oracle)?, rng)
}

/// Power of the mixer applied by one controlled-M query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alpha {
    Forward,
    Inverse,
    Identity,
    /// Read from a 3-dimensional register: digit 0, 1, 2 means -1, 0, +1.
    Register(usize),
}

/// One controlled-M query: `|alpha, i, s> -> |alpha, i, M_i^alpha(s)>` for
/// `s` in S, identity on garbage.
pub fn apply_cm(
    session: &mut QuerySession<'_>,
    state: &QuantumState,
    alpha: Alpha,
    index_reg: usize,
    elem_reg: usize,
) -> Result<QuantumState> {
    let oracle = session.oracle();
    let elem_dim = element_register(oracle)?.dim;
    check_register(state, elem_reg, elem_dim, "element")?;
    check_register(state, index_reg, oracle.index_count() as usize, "index")?;
    if let Alpha::Register(a) = alpha {
        check_register(state, a, 3, "alpha")?;
    }
    session.charge(QueryKind::ControlledM)?;
    let inner = oracle.inner();
    let indices: Vec<u64> = oracle.indices().collect();
    let (es, is) = (state.stride(elem_reg), state.stride(index_reg));
    let idim = indices.len();
    let astride = match alpha {
        Alpha::Register(a) => Some(state.stride(a)),
        _ => None,
    };
    Ok(state.permute_basis(|flat| {
        let power = match (alpha, astride) {
            (Alpha::Forward, _) => 1,
            (Alpha::Inverse, _) => -1,
            (Alpha::Identity, _) => 0,
            (Alpha::Register(_), Some(st)) => ((flat / st) % 3) as i32 - 1,
            _ => 0,
        };
        let x = (flat / es) % elem_dim;
        if power == 0 || !inner.contains(x as u64) {
            return flat;
        }
        let i = indices[(flat / is) % idim];
        let y = if power > 0 { inner.apply(i, x as u64) } else { inner.apply_inverse(i, x as u64) } as usize;
        flat - x * es + y * es
    }))
}

/// `|e0><e0| (x) X + (1 - |e0><e0|) (x) I` on an index register followed by
/// a flag qubit.
pub fn reflection_unitary(index_count: usize) -> DMatrix<Complex64> {
    let dim = 2 * index_count;
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    let w = Complex64::new(1.0 / index_count as f64, 0.0);
    // |e0><e0| (x) (X - I) added to the identity.
    for b in 0..index_count {
        for b2 in 0..index_count {
            u[(2 * b, 2 * b2)] -= w;
            u[(2 * b + 1, 2 * b2 + 1)] -= w;
            u[(2 * b, 2 * b2 + 1)] += w;
            u[(2 * b + 1, 2 * b2)] += w;
        }
    }
    u
}

/// Applies a dense unitary to the trailing registers whose dims multiply to
/// `u.nrows()`.
fn apply_trailing(state: &QuantumState, u: &DMatrix<Complex64>) -> Result<QuantumState> {
    let block = u.nrows();
    let outer = state.dim() / block;
    let m = DMatrix::from_column_slice(block, outer, state.amplitudes());
    let out = u * m;
    QuantumState::normalized(state.registers().to_vec(), out.as_slice().to_vec())
}

#[derive(Debug, Clone)]
pub struct ProjectorOutcome {
    pub outcome: bool,
    pub probability_one: f64,
    /// `<e0|rho_B|e0>` just before B is discarded.
    pub b_fidelity: f64,
    /// Post-measurement state on the input registers.
    pub state: QuantumState,
}

/// Measures the component projector P on element register `target`.
///
/// Adjoins B = e0 and a flag C = |0>, applies U = sum_j M_j (x) |j><j|, the
/// reflection above, then U^dagger, and measures C. Costs two controlled-M
/// queries, one e0 preparation and one coherent e0 reflection. Garbage
/// strings are fixed by every M_j, so P acts as the identity on them.
pub fn measure_component_projector<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    state: &QuantumState,
    target: usize,
    rng: &mut R,
) -> Result<ProjectorOutcome> {
    let oracle = session.oracle();
    check_register(state, target, element_register(oracle)?.dim, "element")?;
    let b = prepare_uniform_ind(session)?;
    let c = QuantumState::basis(vec![Register::new("C", 2)], &[0])?;
    let joint = state.tensor(&b)?.tensor(&c)?;
    let bi = state.registers().len();
    let ci = bi + 1;

    let joint = apply_cm(session, &joint, Alpha::Forward, bi, target)?;
    session.charge(QueryKind::ProjectInd)?;
    let joint = apply_trailing(&joint, &reflection_unitary(oracle.index_count() as usize))?;
    let joint = apply_cm(session, &joint, Alpha::Inverse, bi, target)?;

    let one = [ZERO, Complex64::new(1.0, 0.0)];
    let zero = [one[1], ZERO];
    let m = joint.measure_rank_one(ci, &one, rng)?;
    let (rest, _) = m.state.contract_register(ci, if m.outcome { &one } else { &zero })?;
    let e0 = ind_vector(oracle)?;
    let (post, b_fidelity) = rest.contract_register(bi, &e0)?;
    Ok(ProjectorOutcome { outcome: m.outcome, probability_one: m.probability_one, b_fidelity, state: post })
}

#[derive(Debug, Clone)]
pub struct ProjectionSuccess {
    pub state: QuantumState,
    pub attempts: u64,
}

/// Repeats the projector measurement on `|s>` until it accepts.
pub fn component_superposition_via_projection<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    s: u64,
    max_attempts: u64,
    rng: &mut R,
) -> Result<ProjectionSuccess> {
    let oracle = session.oracle();
    if !oracle.contains(s) {
        return Err(invalid(format!("{s} is not in S")));
    }
    let reg = element_register(oracle)?;
    let input = QuantumState::basis(vec![reg], &[s as usize])?;
    for attempt in 1..=max_attempts {
        let out = measure_component_projector(session, &input, 0, rng)?;
        if out.outcome {
            return Ok(ProjectionSuccess { state: out.state, attempts: attempt });
        }
    }
    Err(MixError::AttemptsExhausted { attempts: max_attempts })
}

#[derive(Debug, Clone, Serialize)]
pub struct SwapOutcome {
    pub different: bool,
    pub probability_different: f64,
    #[serde(skip)]
    pub state: QuantumState,
}

/// Swap test between registers `r1` and `r2` of one joint state.
pub fn swap_test_registers<R: Rng + ?Sized>(
    state: &QuantumState,
    r1: usize,
    r2: usize,
    rng: &mut R,
) -> Result<SwapOutcome> {
    let regs = state.registers();
    if r1 == r2 || r1 >= regs.len() || r2 >= regs.len() {
        return Err(invalid("swap test needs two distinct registers"));
    }
    if regs[r1].dim != regs[r2].dim {
        return Err(MixError::DimensionMismatch { left: regs[r1].dim, right: regs[r2].dim });
    }
    let dim = regs[r1].dim;
    let (s1, s2) = (state.stride(r1), state.stride(r2));
    let swapped = state.permute_basis(|flat| {
        let (d1, d2) = ((flat / s1) % dim, (flat / s2) % dim);
        flat - d1 * s1 - d2 * s2 + d2 * s1 + d1 * s2
    });
    // Ancilla outcome 1 keeps (psi - SWAP psi) / 2.
    let minus: Vec<Complex64> =
        state.amplitudes().iter().zip(swapped.amplitudes()).map(|(a, b)| (a - b) * 0.5).collect();
    let p: f64 = minus.iter().map(|z| z.norm_sqr()).sum::<f64>().clamp(0.0, 1.0);
    let different = rng.random::<f64>() < p;
    let amps = if different {
        minus
    } else {
        state.amplitudes().iter().zip(swapped.amplitudes()).map(|(a, b)| (a + b) * 0.5).collect()
    };
    Ok(SwapOutcome {
        different,
        probability_different: p,
        state: QuantumState::normalized(regs.to_vec(), amps)?,
    })
}

/// Swap test on two independent states.
pub fn swap_test<R: Rng + ?Sized>(a: &QuantumState, b: &QuantumState, rng: &mut R) -> Result<SwapOutcome> {
    if a.dims() != b.dims() {
        return Err(MixError::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let k = a.registers().len();
    if k != 1 {
        return Err(invalid("swap_test takes single-register states"));
    }
    swap_test_registers(&a.tensor(b)?, 0, 1, rng)
}

/// `|Ind|^{-1} sum_j M_j` as a `2^n x 2^n` matrix, garbage fixed.
pub fn average_mixer_matrix(oracle: &MixerOracle) -> Result<DMatrix<Complex64>> {
    let dim = element_register(oracle)?.dim;
    if dim.saturating_mul(dim) > MAX_STATE_ENTRIES {
        return Err(MixError::TooLarge { what: "mixer matrix", size: (dim * dim) as u64, limit: MAX_STATE_ENTRIES as u64 });
    }
    let w = 1.0 / oracle.index_count() as f64;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for i in oracle.indices() {
        for x in 0..dim {
            let y = if oracle.contains(x as u64) { oracle.apply(i, x as u64) as usize } else { x };
            m[(y, x)] += w;
        }
    }
    Ok(m)
}

/// `sum_k |S_k><S_k|`, plus `|x><x|` for each garbage string when
/// `with_garbage` is set (the operator the projector algorithm measures).
pub fn component_projector_matrix(truth: &GroundTruthPartition, with_garbage: bool) -> DMatrix<Complex64> {
    let dim = 1usize << truth.n();
    let mut p = DMatrix::<Complex64>::zeros(dim, dim);
    for comp in truth.components() {
        let w = 1.0 / comp.len() as f64;
        for &a in comp {
            for &b in comp {
                p[(a as usize, b as usize)] += w;
            }
        }
    }
    if with_garbage {
        for x in truth.garbage() {
            p[(x as usize, x as usize)] = Complex64::new(1.0, 0.0);
        }
    }
    p
}

/// The component superposition `|S_j>` of the component containing `x`.
pub fn component_state(truth: &GroundTruthPartition, x: u64) -> Result<QuantumState> {
    let comp = truth
        .component_containing(x)
        .ok_or_else(|| invalid(format!("{x} is not in S")))?;
    let support: Vec<usize> = comp.iter().map(|&u| u as usize).collect();
    QuantumState::uniform(Register::qubits("A", truth.n()), &support)
}
