use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{invalid, MixError, Result};
use crate::quantum::state::{QuantumState, Register};
use crate::quantum::{MAX_STATE_ENTRIES, TRACE_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    registers: Vec<Register>,
    matrix: DMatrix<Complex64>,
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect()
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (tolerance 1e-10).
    pub fn new(registers: Vec<Register>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim: usize = registers.iter().map(|r| r.dim).product();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(MixError::DimensionMismatch { left: matrix.nrows(), right: dim });
        }
        if dim.saturating_mul(dim) > MAX_STATE_ENTRIES {
            return Err(MixError::TooLarge {
                what: "density matrix",
                size: (dim as u64).saturating_mul(dim as u64),
                limit: MAX_STATE_ENTRIES as u64,
            });
        }
        let defect = hermitian_defect(&matrix);
        if defect > TRACE_TOL {
            return Err(invalid(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(invalid(format!("trace {trace} is not 1")));
        }
        if let Some(low) = eigenvalues(&matrix).into_iter().find(|&e| e < -TRACE_TOL) {
            return Err(invalid(format!("negative eigenvalue {low:e}")));
        }
        Ok(DensityMatrix { registers, matrix })
    }

    pub fn from_pure(state: &QuantumState) -> Result<Self> {
        state.density()
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_with_pure(&self, psi: &QuantumState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(MixError::DimensionMismatch { left: psi.dim(), right: self.dim() });
        }
        let a = psi.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..a.len() {
            if a[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..a.len() {
                acc += a[i].conj() * self.matrix[(i, j)] * a[j];
            }
        }
        Ok(acc.re)
    }

    /// `{"registers": [...], "matrix": [[[re, im], ...], ...]}`.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im]).collect())
            .collect();
        json!({ "registers": self.registers, "matrix": rows })
    }
}

/// Running average of pure states with equal weight.
#[derive(Debug, Clone)]
pub struct DensityAccumulator {
    registers: Vec<Register>,
    sum: DMatrix<Complex64>,
    count: u64,
}

impl DensityAccumulator {
    pub fn new(registers: Vec<Register>) -> Self {
        let dim: usize = registers.iter().map(|r| r.dim).product();
        DensityAccumulator { registers, sum: DMatrix::zeros(dim, dim), count: 0 }
    }

    pub fn add_pure(&mut self, state: &QuantumState) -> Result<()> {
        if state.dim() != self.sum.nrows() {
            return Err(MixError::DimensionMismatch { left: state.dim(), right: self.sum.nrows() });
        }
        let a = state.amplitudes();
        for i in 0..a.len() {
            if a[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..a.len() {
                self.sum[(i, j)] += a[i] * a[j].conj();
            }
        }
        self.count += 1;
        Ok(())
    }

    pub fn add_density(&mut self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.sum.nrows() {
            return Err(MixError::DimensionMismatch { left: rho.dim(), right: self.sum.nrows() });
        }
        self.sum += rho.matrix();
        self.count += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &DensityAccumulator) -> Result<()> {
        if other.sum.nrows() != self.sum.nrows() {
            return Err(MixError::DimensionMismatch { left: other.sum.nrows(), right: self.sum.nrows() });
        }
        self.sum += &other.sum;
        self.count += other.count;
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(&self) -> Result<DensityMatrix> {
        if self.count == 0 {
            return Err(invalid("no samples accumulated"));
        }
        DensityMatrix::new(self.registers.clone(), self.sum.map(|z| z / self.count as f64))
    }
}

/// `(1/2) ||rho1 - rho2||_1`, from the eigenvalues of the difference.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(MixError::DimensionMismatch { left: rho1.dim(), right: rho2.dim() });
    }
    for m in [rho1.matrix(), rho2.matrix()] {
        if hermitian_defect(m) > TRACE_TOL {
            return Err(invalid("trace distance of a non-Hermitian matrix"));
        }
    }
    let diff = rho1.matrix() - rho2.matrix();
    Ok(eigenvalues(&diff).iter().map(|e| e.abs()).sum::<f64>() / 2.0)
}
