use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rotation axis of a Pauli rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Cnot,
}

impl GateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cnot => "CNOT",
        }
    }
}

impl From<Axis> for GateKind {
    fn from(axis: Axis) -> Self {
        match axis {
            Axis::X => GateKind::Rx,
            Axis::Y => GateKind::Ry,
            Axis::Z => GateKind::Rz,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single gate with concrete parameters.
///
/// Rotations use the half-angle convention, `R_P(θ) = cos(θ/2) I - i sin(θ/2) P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rotation { axis: Axis, target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn rx(target: usize, angle: f64) -> Self {
        Gate::Rotation { axis: Axis::X, target, angle }
    }

    pub fn ry(target: usize, angle: f64) -> Self {
        Gate::Rotation { axis: Axis::Y, target, angle }
    }

    pub fn rz(target: usize, angle: f64) -> Self {
        Gate::Rotation { axis: Axis::Z, target, angle }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Rotation { axis, .. } => (*axis).into(),
            Gate::Cnot { .. } => GateKind::Cnot,
        }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::Rotation { target, .. } | Gate::Cnot { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            Gate::Cnot { control, .. } => Some(control),
            Gate::Rotation { .. } => None,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rotation { angle, .. } => Some(angle),
            Gate::Cnot { .. } => None,
        }
    }

    /// Checks that the gate addresses distinct qubits inside an `num_qubits` register.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        match *self {
            Gate::Rotation { target, angle, .. } => {
                if target >= num_qubits {
                    return Err(Error::Circuit(format!(
                        "{} target q{target} out of range for {num_qubits} qubit(s)",
                        self.kind()
                    )));
                }
                if !angle.is_finite() {
                    return Err(Error::Circuit(format!("{} angle is not finite", self.kind())));
                }
            }
            Gate::Cnot { control, target } => {
                if control >= num_qubits || target >= num_qubits {
                    return Err(Error::Circuit(format!(
                        "CNOT q{control}->q{target} out of range for {num_qubits} qubit(s)"
                    )));
                }
                if control == target {
                    return Err(Error::Circuit(format!("CNOT control and target are both q{target}")));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rotation { target, angle, .. } => write!(f, "{}({angle:.4}) q{target}", self.kind()),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control}->q{target}"),
        }
    }
}
