//! Simulation, training and analysis engine for exploring how angle
//! encoders shape a two-qubit quantum classifier.
//!
//! * [`quantum`]: dense statevector and density-matrix simulation.
//! * [`encoding`]: the encoder catalog, encoder maps and evolution frames.
//! * [`datasets`]: the built-in labelled grids.
//! * [`training`]: fixed ansatz, parameter-shift gradients, training loop.
//! * [`analysis`]: State Comparison Map (density matrices → PCA) and scoring.
//! * [`control`]: run-state machine shared by the CLI and the service.

pub mod analysis;
pub mod control;
pub mod datasets;
pub mod encoding;
mod error;
pub mod quantum;
pub mod training;

pub use error::{Error, Result};

/// Engine version recorded in exported reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
