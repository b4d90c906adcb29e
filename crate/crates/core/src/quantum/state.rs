//! Dense pure states over named registers.
//!
//! Basis index layout is row-major: the first register is the most
//! significant digit. A register of `k` qubits holding n-bit strings has
//! dimension `2^k`, and the string's integer value is its digit, so a single
//! 2n-qubit register and the pair (high n, low n) share the same layout.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{invalid, MixError, Result};
use crate::quantum::density::DensityMatrix;
use crate::quantum::{MAX_STATE_ENTRIES, NORM_TOL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Register {
    pub name: String,
    pub dim: usize,
}

impl Register {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Register { name: name.into(), dim }
    }

    pub fn qubits(name: impl Into<String>, bits: u32) -> Self {
        Register::new(name, 1usize << bits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    registers: Vec<Register>,
    amps: Vec<Complex64>,
}

/// Outcome of a two-outcome projective measurement.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub outcome: bool,
    pub probability_one: f64,
    pub state: QuantumState,
}

fn check_size(registers: &[Register]) -> Result<usize> {
    let mut total: usize = 1;
    for r in registers {
        if r.dim == 0 {
            return Err(invalid(format!("register {} has dimension 0", r.name)));
        }
        total = total
            .checked_mul(r.dim)
            .filter(|&t| t <= MAX_STATE_ENTRIES)
            .ok_or(MixError::TooLarge {
                what: "state vector",
                size: u64::MAX,
                limit: MAX_STATE_ENTRIES as u64,
            })?;
    }
    Ok(total)
}

impl QuantumState {
    /// Wraps amplitudes; they must already have unit norm.
    pub fn new(registers: Vec<Register>, amps: Vec<Complex64>) -> Result<Self> {
        let dim = check_size(&registers)?;
        if amps.len() != dim {
            return Err(MixError::DimensionMismatch { left: amps.len(), right: dim });
        }
        let state = QuantumState { registers, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("state has norm {norm}, expected 1")));
        }
        Ok(state)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(registers: Vec<Register>, mut amps: Vec<Complex64>) -> Result<Self> {
        let dim = check_size(&registers)?;
        if amps.len() != dim {
            return Err(MixError::DimensionMismatch { left: amps.len(), right: dim });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid("cannot normalize the zero vector"));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(QuantumState { registers, amps })
    }

    pub fn basis(registers: Vec<Register>, digits: &[usize]) -> Result<Self> {
        let dim = check_size(&registers)?;
        if digits.len() != registers.len() {
            return Err(invalid("one digit per register"));
        }
        let mut idx = 0;
        for (r, &d) in registers.iter().zip(digits) {
            if d >= r.dim {
                return Err(invalid(format!("digit {d} out of range for register {}", r.name)));
            }
            idx = idx * r.dim + d;
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { registers, amps })
    }

    /// Uniform superposition over `support` on a single register.
    pub fn uniform(register: Register, support: &[usize]) -> Result<Self> {
        if support.is_empty() {
            return Err(invalid("uniform superposition over an empty set"));
        }
        let dim = check_size(std::slice::from_ref(&register))?;
        let a = Complex64::new(1.0 / (support.len() as f64).sqrt(), 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for &k in support {
            if k >= dim {
                return Err(invalid(format!("support element {k} outside register")));
            }
            amps[k] = a;
        }
        Ok(QuantumState { registers: vec![register], amps })
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn dims(&self) -> Vec<usize> {
        self.registers.iter().map(|r| r.dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    /// Product of dims of registers after `k`.
    pub fn stride(&self, k: usize) -> usize {
        self.registers[k + 1..].iter().map(|r| r.dim).product()
    }

    pub fn digit(&self, flat: usize, k: usize) -> usize {
        (flat / self.stride(k)) % self.registers[k].dim
    }

    pub fn register_index(&self, name: &str) -> Option<usize> {
        self.registers.iter().position(|r| r.name == name)
    }

    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        let mut registers = self.registers.clone();
        registers.extend(other.registers.iter().cloned());
        check_size(&registers)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(QuantumState { registers, amps })
    }

    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.dims() != other.dims() {
            return Err(MixError::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Applies the basis permutation `flat -> f(flat)`, which must be a
    /// bijection on `0..dim`.
    pub fn permute_basis(&self, f: impl Fn(usize) -> usize) -> QuantumState {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (k, a) in self.amps.iter().enumerate() {
            amps[f(k)] += a;
        }
        QuantumState { registers: self.registers.clone(), amps }
    }

    /// Replaces register `k` (a permutation of its basis given by `table`).
    pub fn permute_register(&self, k: usize, table: &[usize]) -> Result<QuantumState> {
        let dim = self.registers[k].dim;
        if table.len() != dim {
            return Err(MixError::DimensionMismatch { left: table.len(), right: dim });
        }
        let stride = self.stride(k);
        Ok(self.permute_basis(|flat| {
            let d = (flat / stride) % dim;
            flat - d * stride + table[d] * stride
        }))
    }

    /// Splits register `k` into two registers of dims `high * low = dim`.
    pub fn split_register(&self, k: usize, high: Register, low: Register) -> Result<QuantumState> {
        if high.dim * low.dim != self.registers[k].dim {
            return Err(MixError::DimensionMismatch {
                left: high.dim * low.dim,
                right: self.registers[k].dim,
            });
        }
        let mut registers = self.registers.clone();
        registers.splice(k..=k, [high, low]);
        Ok(QuantumState { registers, amps: self.amps.clone() })
    }

    /// Density matrix of the registers listed in `keep`, tracing out the rest.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let nreg = self.registers.len();
        if keep.iter().any(|&k| k >= nreg) || (1..keep.len()).any(|i| keep[..i].contains(&keep[i])) {
            return Err(invalid("bad register selection"));
        }
        let kept: Vec<Register> = keep.iter().map(|&k| self.registers[k].clone()).collect();
        let kdim: usize = kept.iter().map(|r| r.dim).product();
        let traced: Vec<usize> = (0..nreg).filter(|k| !keep.contains(k)).collect();
        let tdim: usize = traced.iter().map(|&k| self.registers[k].dim).product();
        let strides: Vec<usize> = (0..nreg).map(|k| self.stride(k)).collect();
        let flat = |kd: usize, td: usize| {
            let mut idx = 0;
            let mut rest = kd;
            for &k in keep.iter().rev() {
                let d = self.registers[k].dim;
                idx += (rest % d) * strides[k];
                rest /= d;
            }
            let mut rest = td;
            for &k in traced.iter().rev() {
                let d = self.registers[k].dim;
                idx += (rest % d) * strides[k];
                rest /= d;
            }
            idx
        };
        let mut rho = nalgebra::DMatrix::<Complex64>::zeros(kdim, kdim);
        for t in 0..tdim {
            let column: Vec<Complex64> = (0..kdim).map(|kd| self.amps[flat(kd, t)]).collect();
            for i in 0..kdim {
                if column[i] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..kdim {
                    rho[(i, j)] += column[i] * column[j].conj();
                }
            }
        }
        DensityMatrix::new(kept, rho)
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        let all: Vec<usize> = (0..self.registers.len()).collect();
        self.reduced(&all)
    }

    /// Contracts register `k` with `<v|` and renormalizes. Returns the
    /// remaining state and the squared norm that was kept.
    pub fn contract_register(&self, k: usize, v: &[Complex64]) -> Result<(QuantumState, f64)> {
        let dim = self.registers[k].dim;
        if v.len() != dim {
            return Err(MixError::DimensionMismatch { left: v.len(), right: dim });
        }
        let stride = self.stride(k);
        let outer = self.amps.len() / (dim * stride);
        let mut amps = Vec::with_capacity(outer * stride);
        for o in 0..outer {
            for s in 0..stride {
                let mut acc = Complex64::new(0.0, 0.0);
                for (d, vd) in v.iter().enumerate() {
                    acc += vd.conj() * self.amps[(o * dim + d) * stride + s];
                }
                amps.push(acc);
            }
        }
        let mut registers = self.registers.clone();
        registers.remove(k);
        let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        Ok((QuantumState::normalized(registers, amps)?, kept))
    }

    /// Measures `|v><v|` on register `k`; `v` must be a unit vector.
    pub fn measure_rank_one<R: Rng + ?Sized>(&self, k: usize, v: &[Complex64], rng: &mut R) -> Result<Measurement> {
        let dim = self.registers[k].dim;
        if v.len() != dim {
            return Err(MixError::DimensionMismatch { left: v.len(), right: dim });
        }
        let stride = self.stride(k);
        let outer = self.amps.len() / (dim * stride);
        // Component of the state along |v> on register k.
        let mut along = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for o in 0..outer {
            for s in 0..stride {
                let mut c = Complex64::new(0.0, 0.0);
                for (d, vd) in v.iter().enumerate() {
                    c += vd.conj() * self.amps[(o * dim + d) * stride + s];
                }
                for (d, vd) in v.iter().enumerate() {
                    along[(o * dim + d) * stride + s] = vd * c;
                }
            }
        }
        let p1: f64 = along.iter().map(|a| a.norm_sqr()).sum::<f64>().clamp(0.0, 1.0);
        let outcome = rng.random::<f64>() < p1;
        let amps = if outcome {
            along
        } else {
            self.amps.iter().zip(&along).map(|(a, b)| a - b).collect()
        };
        Ok(Measurement {
            outcome,
            probability_one: p1,
            state: QuantumState::normalized(self.registers.clone(), amps)?,
        })
    }

    /// `{"registers": [...], "amplitudes": [[re, im], ...]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "registers": self.registers,
            "amplitudes": self.amps.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
        })
    }
}
