//! Dense statevector and density-matrix simulation for small registers.
//!
//! Basis ordering puts qubit 0 in the most significant bit, so for two
//! qubits the amplitudes are indexed `|q0 q1>`: `|00>, |01>, |10>, |11>`.

mod density;
mod gate;
mod state;

pub use density::DensityMatrix;
pub use gate::{Axis, Gate, GateKind};
pub use state::{run_circuit, StateVector, MAX_QUBITS};

pub use num_complex::Complex64 as Amplitude;
