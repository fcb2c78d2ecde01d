use num_complex::Complex64;

use super::gate::{Axis, Gate};
use crate::error::{Error, Result};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 10;

const NORM_TOLERANCE: f64 = 1e-10;

/// Normalized amplitude vector of an `n`-qubit register, `2^n` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_qubits(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::InvalidConfig(format!("qubit count must be within 1..={MAX_QUBITS}, got {num_qubits}")));
    }
    Ok(())
}

impl StateVector {
    /// The all-zero basis state `|0...0>`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes })
    }

    /// Wraps an amplitude vector that is already normalized.
    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubits(num_qubits)?;
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::Contract(format!(
                "{num_qubits} qubit(s) need {} amplitudes, got {}",
                1usize << num_qubits,
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Contract("amplitudes must be finite".into()));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Contract(format!("state is not normalized (norm² = {norm})")));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Scales an arbitrary nonzero vector onto the unit sphere.
    pub fn normalize(num_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Contract("cannot normalize a zero or non-finite vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::from_amplitudes(num_qubits, amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of each computational basis state, `|<x|ψ>|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal probabilities of qubit 0 reading `|0>` and `|1>`.
    pub fn qubit0_probs(&self) -> (f64, f64) {
        let half = self.amplitudes.len() / 2;
        let p0: f64 = self.amplitudes[..half].iter().map(|a| a.norm_sqr()).sum();
        let p1: f64 = self.amplitudes[half..].iter().map(|a| a.norm_sqr()).sum();
        (p0, p1)
    }

    /// `<Z>` on qubit 0: probability mass with q0 = 0 minus mass with q0 = 1.
    pub fn expectation_z0(&self) -> f64 {
        let (p0, p1) = self.qubit0_probs();
        (p0 - p1).clamp(-1.0, 1.0)
    }

    /// Returns the state after `gate`.
    pub fn apply(&self, gate: &Gate) -> Result<Self> {
        let mut next = self.clone();
        next.apply_in_place(gate)?;
        Ok(next)
    }

    pub fn apply_in_place(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match *gate {
            Gate::Rotation { axis, target, angle } => {
                let [m00, m01, m10, m11] = rotation_matrix(axis, angle);
                let mask = self.mask(target);
                for i in 0..self.amplitudes.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
                        self.amplitudes[i] = m00 * a + m01 * b;
                        self.amplitudes[j] = m10 * a + m11 * b;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let cmask = self.mask(control);
                let tmask = self.mask(target);
                for i in 0..self.amplitudes.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amplitudes.swap(i, i | tmask);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        for gate in gates {
            self.apply_in_place(gate)?;
        }
        Ok(())
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }
}

/// Row-major 2×2 matrix of a Pauli rotation.
pub(crate) fn rotation_matrix(axis: Axis, angle: f64) -> [Complex64; 4] {
    let (s, c) = (angle / 2.0).sin_cos();
    let zero = Complex64::new(0.0, 0.0);
    match axis {
        Axis::X => [Complex64::new(c, 0.0), Complex64::new(0.0, -s), Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        Axis::Y => [Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        Axis::Z => [Complex64::new(c, -s), zero, zero, Complex64::new(c, s)],
    }
}

/// Folds `gates` over `|0...0>`.
pub fn run_circuit(gates: &[Gate], num_qubits: usize) -> Result<StateVector> {
    let mut state = StateVector::zero(num_qubits)?;
    state.apply_all(gates)?;
    Ok(state)
}
