use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::Gate;

pub const NUM_PARAMS: usize = 7;
pub const ANSATZ_GATES: usize = 10;

/// Rotation angles of the fixed ansatz, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AnsatzParams([f64; NUM_PARAMS]);

impl AnsatzParams {
    pub fn new(values: &[f64]) -> Result<Self> {
        let values: [f64; NUM_PARAMS] = values
            .try_into()
            .map_err(|_| Error::Contract(format!("ansatz takes {NUM_PARAMS} parameters, got {}", values.len())))?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Contract("ansatz parameters must be finite".into()));
        }
        Ok(Self(values))
    }

    pub fn zeros() -> Self {
        Self([0.0; NUM_PARAMS])
    }

    /// Independent uniform draws in `[0, 2π)`.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self(std::array::from_fn(|_| rng.random_range(0.0..TAU)))
    }

    pub fn values(&self) -> &[f64; NUM_PARAMS] {
        &self.0
    }

    pub fn with(&self, index: usize, value: f64) -> Self {
        let mut next = self.0;
        next[index] = value;
        Self(next)
    }

    pub(crate) fn shifted(&self, index: usize, delta: f64) -> Self {
        self.with(index, self.0[index] + delta)
    }

    /// `self - step * direction`.
    pub fn descend(&self, step: f64, direction: &[f64; NUM_PARAMS]) -> Self {
        Self(std::array::from_fn(|k| self.0[k] - step * direction[k]))
    }
}

/// Three `RY q0; RY q1; CNOT q0→q1` layers followed by a closing `RY q0`.
pub fn ansatz_gates(params: &AnsatzParams) -> Vec<Gate> {
    let t = params.values();
    let mut gates = Vec::with_capacity(ANSATZ_GATES);
    for layer in 0..3 {
        gates.push(Gate::ry(0, t[2 * layer]));
        gates.push(Gate::ry(1, t[2 * layer + 1]));
        gates.push(Gate::cnot(0, 1));
    }
    gates.push(Gate::ry(0, t[6]));
    gates
}
