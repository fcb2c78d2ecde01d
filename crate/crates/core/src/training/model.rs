use std::f64::consts::FRAC_PI_2;

use super::ansatz::{ansatz_gates, AnsatzParams, NUM_PARAMS};
use crate::datasets::LabeledGrid;
use crate::encoding::{bind_angles, encode_point, EncoderTemplate, ExpectationGrid, ScalarGrid, ENCODER_QUBITS};
use crate::error::Result;
use crate::quantum::{run_circuit, StateVector};

/// Model output for one point: `<Z>` on qubit 0 after encoder and ansatz.
pub fn forward(encoder: &EncoderTemplate, params: &AnsatzParams, features: [f64; 2]) -> Result<f64> {
    let mut gates = bind_angles(encoder, features);
    gates.extend(ansatz_gates(params));
    Ok(run_circuit(&gates, ENCODER_QUBITS)?.expectation_z0())
}

/// Encoded states of a whole grid, computed once and reused across epochs.
#[derive(Debug, Clone)]
pub struct EncodedBatch {
    resolution: usize,
    states: Vec<StateVector>,
    labels: Vec<f64>,
}

impl EncodedBatch {
    pub fn new(encoder: &EncoderTemplate, grid: &LabeledGrid) -> Result<Self> {
        let states = grid.points().iter().map(|p| encode_point(encoder, p.features())).collect::<Result<_>>()?;
        Ok(Self { resolution: grid.resolution(), states, labels: grid.labels() })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Model outputs for every cell, row-major.
    pub fn outputs(&self, params: &AnsatzParams) -> Result<Vec<f64>> {
        let gates = ansatz_gates(params);
        self.states
            .iter()
            .map(|encoded| {
                let mut state = encoded.clone();
                state.apply_all(&gates)?;
                Ok(state.expectation_z0())
            })
            .collect()
    }

    pub fn output_grid(&self, params: &AnsatzParams) -> Result<ExpectationGrid> {
        ScalarGrid::new(self.resolution, self.outputs(params)?)
    }

    /// MSE gradient by the parameter-shift rule, given the outputs at `params`.
    pub fn gradient(&self, params: &AnsatzParams, outputs: &[f64]) -> Result<[f64; NUM_PARAMS]> {
        let n = self.len() as f64;
        let mut grad = [0.0; NUM_PARAMS];
        for (k, slot) in grad.iter_mut().enumerate() {
            let plus = self.outputs(&params.shifted(k, FRAC_PI_2))?;
            let minus = self.outputs(&params.shifted(k, -FRAC_PI_2))?;
            let mut acc = 0.0;
            for i in 0..outputs.len() {
                let d_output = (plus[i] - minus[i]) / 2.0;
                acc += (outputs[i] - self.labels[i]) * d_output;
            }
            *slot = 2.0 * acc / n;
        }
        Ok(grad)
    }
}

/// Exact gradient of the grid MSE with respect to each ansatz angle.
pub fn parameter_shift_grad(
    encoder: &EncoderTemplate,
    params: &AnsatzParams,
    grid: &LabeledGrid,
) -> Result<[f64; NUM_PARAMS]> {
    let batch = EncodedBatch::new(encoder, grid)?;
    let outputs = batch.outputs(params)?;
    batch.gradient(params, &outputs)
}

/// The model's decision surface over the grid.
pub fn trained_map(encoder: &EncoderTemplate, params: &AnsatzParams, grid: &LabeledGrid) -> Result<ExpectationGrid> {
    EncodedBatch::new(encoder, grid)?.output_grid(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;
    use crate::encoding::{encoder_map, find_encoder};
    use crate::quantum::Gate;
    use crate::training::loss;
    use std::f64::consts::PI;

    #[test]
    fn forward_examples() {
        let e01 = find_encoder("E01").unwrap();
        let zero = AnsatzParams::zeros();
        assert!((forward(e01, &zero, [0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        for f1 in [0.0, 0.4, 1.0] {
            assert!((forward(e01, &zero, [1.0, f1]).unwrap() + 1.0).abs() < 1e-15);
        }
        // only the closing RY acts: |00> -> |10>
        let flip = zero.with(6, PI);
        assert!((forward(e01, &flip, [0.0, 0.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn shift_rule_on_single_ry() {
        // f(θ) = <Z> after RY(θ)|0> = cos θ
        let f = |theta: f64| run_circuit(&[Gate::ry(0, theta)], 1).unwrap().expectation_z0();
        let shift = |theta: f64| (f(theta + FRAC_PI_2) - f(theta - FRAC_PI_2)) / 2.0;
        assert!((shift(PI / 2.0) + 1.0).abs() < 1e-15);
        assert!(shift(0.0).abs() < 1e-15);
    }

    #[test]
    fn batch_matches_forward() {
        let grid = datasets::generate("D4-diagonal", 5).unwrap();
        let params = AnsatzParams::random(3);
        for encoder in crate::encoding::encoder_catalog() {
            let outputs = EncodedBatch::new(encoder, &grid).unwrap().outputs(&params).unwrap();
            for (p, out) in grid.points().iter().zip(&outputs) {
                assert_eq!(*out, forward(encoder, &params, p.features()).unwrap());
            }
        }
    }

    #[test]
    fn trained_map_at_zero_params_is_encoder_map() {
        let grid = datasets::generate("D1-vstripes", 16).unwrap();
        let e01 = find_encoder("E01").unwrap();
        let trained = trained_map(e01, &AnsatzParams::zeros(), &grid).unwrap();
        let encoded = encoder_map(e01, &grid).unwrap();
        for (a, b) in trained.values().iter().zip(encoded.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(trained.values().iter().all(|v| (-1.0..=1.0).contains(v)));
        assert_eq!(trained, trained_map(e01, &AnsatzParams::zeros(), &grid).unwrap());
    }

    #[test]
    fn small_step_descends() {
        let grid = datasets::generate("D2-checkerboard", 4).unwrap();
        for seed in 0..10u64 {
            let encoder = &crate::encoding::encoder_catalog()[seed as usize];
            let params = AnsatzParams::random(seed);
            let batch = EncodedBatch::new(encoder, &grid).unwrap();
            let out = batch.outputs(&params).unwrap();
            let before = loss(&out, batch.labels()).unwrap();
            let grad = batch.gradient(&params, &out).unwrap();
            let next = params.descend(1e-3, &grad);
            let after = loss(&batch.outputs(&next).unwrap(), batch.labels()).unwrap();
            assert!(after <= before + 1e-9, "seed {seed}: {before} -> {after}");
        }
    }
}
