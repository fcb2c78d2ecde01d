//! Angle encoders: feature-to-angle binding, the encoder map and its
//! gate-by-gate evolution.

mod catalog;

use std::fmt;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::datasets::LabeledGrid;
use crate::error::{Error, Result};
use crate::quantum::{Axis, Gate, GateKind, StateVector};

pub use catalog::{encoder_catalog, find_encoder};

/// Encoders act on a two-qubit register.
pub const ENCODER_QUBITS: usize = 2;
pub const MAX_ENCODER_GATES: usize = 8;

/// Ties a rotation angle to one input feature: `angle = scale * features[feature_index]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureBinding {
    feature_index: usize,
    scale: f64,
}

impl FeatureBinding {
    pub fn new(feature_index: usize, scale: f64) -> Result<Self> {
        if feature_index > 1 {
            return Err(Error::InvalidConfig(format!("feature index must be 0 or 1, got {feature_index}")));
        }
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::InvalidConfig(format!("binding scale must be finite and nonzero, got {scale}")));
        }
        Ok(Self { feature_index, scale })
    }

    pub fn feature_index(&self) -> usize {
        self.feature_index
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn angle(&self, features: [f64; 2]) -> f64 {
        self.scale * features[self.feature_index]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EncoderGate {
    Rotation { axis: Axis, target: usize, binding: FeatureBinding },
    Cnot { control: usize, target: usize },
}

impl EncoderGate {
    pub fn kind(&self) -> GateKind {
        match self {
            EncoderGate::Rotation { axis, .. } => (*axis).into(),
            EncoderGate::Cnot { .. } => GateKind::Cnot,
        }
    }

    pub fn bind(&self, features: [f64; 2]) -> Gate {
        match *self {
            EncoderGate::Rotation { axis, target, binding } => {
                Gate::Rotation { axis, target, angle: binding.angle(features) }
            }
            EncoderGate::Cnot { control, target } => Gate::Cnot { control, target },
        }
    }
}

impl fmt::Display for EncoderGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EncoderGate::Rotation { target, binding, .. } => {
                let feature = binding.feature_index();
                if binding.scale() == std::f64::consts::PI {
                    write!(f, "{}(π·f{feature}) q{target}", self.kind())
                } else {
                    write!(f, "{}({}·f{feature}) q{target}", self.kind(), binding.scale())
                }
            }
            EncoderGate::Cnot { control, target } => write!(f, "CNOT q{control}→q{target}"),
        }
    }
}

impl Serialize for EncoderGate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (target, control, binding) = match *self {
            EncoderGate::Rotation { target, binding, .. } => (target, None, Some(binding)),
            EncoderGate::Cnot { control, target } => (target, Some(control), None),
        };
        let mut s = serializer.serialize_struct("EncoderGate", 5)?;
        s.serialize_field("kind", &self.kind())?;
        s.serialize_field("target", &target)?;
        s.serialize_field("control", &control)?;
        s.serialize_field("feature_index", &binding.map(|b| b.feature_index()))?;
        s.serialize_field("scale", &binding.map(|b| b.scale()))?;
        s.end()
    }
}

/// A named encoder circuit with feature-bound rotations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncoderTemplate {
    id: String,
    display_name: String,
    description: String,
    gates: Vec<EncoderGate>,
}

impl EncoderTemplate {
    pub fn new(
        id: impl Into<String>,
        display_name: impl Into<String>,
        description: impl Into<String>,
        gates: Vec<EncoderGate>,
    ) -> Result<Self> {
        let id = id.into();
        if gates.is_empty() || gates.len() > MAX_ENCODER_GATES {
            return Err(Error::InvalidConfig(format!(
                "encoder {id} has {} gates, expected 1..={MAX_ENCODER_GATES}",
                gates.len()
            )));
        }
        for gate in &gates {
            gate.bind([0.0, 0.0]).validate(ENCODER_QUBITS)?;
        }
        for feature in 0..2 {
            let used = gates
                .iter()
                .any(|g| matches!(g, EncoderGate::Rotation { binding, .. } if binding.feature_index() == feature));
            if !used {
                return Err(Error::InvalidConfig(format!("encoder {id} never reads feature f{feature}")));
            }
        }
        Ok(Self { id, display_name: display_name.into(), description: description.into(), gates })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn display_name(&self) -> &str {
        &self.display_name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn gates(&self) -> &[EncoderGate] {
        &self.gates
    }
}

/// Concrete gates for one data point. Features outside `[0, 1]` are clamped.
pub fn bind_angles(template: &EncoderTemplate, features: [f64; 2]) -> Vec<Gate> {
    let features = clamp_features(features);
    template.gates.iter().map(|g| g.bind(features)).collect()
}

fn clamp_features(features: [f64; 2]) -> [f64; 2] {
    features.map(|f| {
        if (0.0..=1.0).contains(&f) {
            f
        } else {
            let clamped = if f.is_nan() { 0.0 } else { f.clamp(0.0, 1.0) };
            log::warn!("feature value {f} outside [0, 1], clamped to {clamped}");
            clamped
        }
    })
}

/// Encoded register state for one data point.
pub fn encode_point(template: &EncoderTemplate, features: [f64; 2]) -> Result<StateVector> {
    crate::quantum::run_circuit(&bind_angles(template, features), ENCODER_QUBITS)
}

/// Row-major `G × G` grid of real values (row = feature-1 bin, column = feature-0 bin).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    resolution: usize,
    values: Vec<f64>,
}

/// Grid of qubit-0 `<Z>` values in `[-1, 1]`.
pub type ExpectationGrid = ScalarGrid;

impl ScalarGrid {
    pub fn new(resolution: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != resolution * resolution {
            return Err(Error::Contract(format!(
                "grid of resolution {resolution} needs {} values, got {}",
                resolution * resolution,
                values.len()
            )));
        }
        Ok(Self { resolution, values })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.resolution + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.resolution)
    }
}

impl Serialize for ScalarGrid {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[f64]> = self.rows().collect();
        let mut s = serializer.serialize_struct("ScalarGrid", 2)?;
        s.serialize_field("resolution", &self.resolution)?;
        s.serialize_field("values", &rows)?;
        s.end()
    }
}

/// Expectation of qubit 0 after the full encoder, for every grid cell.
pub fn encoder_map(template: &EncoderTemplate, grid: &LabeledGrid) -> Result<ExpectationGrid> {
    let values = grid
        .points()
        .iter()
        .map(|p| encode_point(template, p.features()).map(|s| s.expectation_z0()))
        .collect::<Result<Vec<_>>>()?;
    ScalarGrid::new(grid.resolution(), values)
}

/// Qubit-0 statistics of every cell after the first `step_index` encoder gates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionFrame {
    pub step_index: usize,
    pub gate_label: String,
    pub expectation: ExpectationGrid,
    pub prob0: ScalarGrid,
    pub prob1: ScalarGrid,
}

/// One frame per prefix of the encoder, starting with the untouched `|00>` register.
pub fn evolution(template: &EncoderTemplate, grid: &LabeledGrid) -> Result<Vec<EvolutionFrame>> {
    let steps = template.gates.len() + 1;
    let cells = grid.len();
    let mut expectation = vec![vec![0.0; cells]; steps];
    let mut prob0 = vec![vec![0.0; cells]; steps];
    let mut prob1 = vec![vec![0.0; cells]; steps];

    for (cell, point) in grid.points().iter().enumerate() {
        let mut state = StateVector::zero(ENCODER_QUBITS)?;
        let gates = bind_angles(template, point.features());
        for step in 0..steps {
            if step > 0 {
                state.apply_in_place(&gates[step - 1])?;
            }
            let (p0, p1) = state.qubit0_probs();
            expectation[step][cell] = state.expectation_z0();
            prob0[step][cell] = p0;
            prob1[step][cell] = p1;
        }
    }

    let g = grid.resolution();
    expectation
        .into_iter()
        .zip(prob0)
        .zip(prob1)
        .enumerate()
        .map(|(step, ((e, p0), p1))| {
            let gate_label =
                if step == 0 { "initial |00⟩".to_string() } else { template.gates[step - 1].to_string() };
            Ok(EvolutionFrame {
                step_index: step,
                gate_label,
                expectation: ScalarGrid::new(g, e)?,
                prob0: ScalarGrid::new(g, p0)?,
                prob1: ScalarGrid::new(g, p1)?,
            })
        })
        .collect()
}
