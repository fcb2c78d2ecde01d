use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{Error, Result};

/// Density matrix `ρ = |ψ><ψ|` of a pure register state, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_state(state: &StateVector) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in amps {
            for b in amps {
                entries.push(a * b.conj());
            }
        }
        Self { num_qubits: state.num_qubits(), dim, entries }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Side length, `2^num_qubits`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// `ρ²`, row-major.
    pub fn squared(&self) -> Vec<Complex64> {
        matmul(&self.entries, &self.entries, self.dim)
    }

    /// `Tr(ρ²)`; 1 for pure states.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// `Tr(ρ · op)` for a row-major `dim × dim` operator.
    pub fn trace_with(&self, operator: &[Complex64]) -> Result<Complex64> {
        if operator.len() != self.entries.len() {
            return Err(Error::Contract(format!(
                "operator has {} entries, expected {}",
                operator.len(),
                self.entries.len()
            )));
        }
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.entries[i * n + k] * operator[k * n + i];
            }
        }
        Ok(acc)
    }
}

fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}
