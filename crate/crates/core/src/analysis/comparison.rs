use serde::Serialize;

use super::pca::{fit_pca, PcaModel};
use crate::datasets::{Label, LabeledGrid};
use crate::encoding::{encode_point, EncoderTemplate};
use crate::error::Result;
use crate::quantum::DensityMatrix;

/// Real-valued layout of a density matrix: all real parts row-major, then
/// all imaginary parts row-major (`2 · dim²` entries).
#[derive(Debug, Clone, PartialEq)]
pub struct FlattenedState(Vec<f64>);

impl FlattenedState {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

pub fn flatten_density(dm: &DensityMatrix) -> FlattenedState {
    let entries = dm.entries();
    let mut out = Vec::with_capacity(2 * entries.len());
    out.extend(entries.iter().map(|e| e.re));
    out.extend(entries.iter().map(|e| e.im));
    FlattenedState(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonPoint {
    pub x: f64,
    pub y: f64,
    pub label: Label,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonMap {
    pub model: PcaModel,
    pub points: Vec<ComparisonPoint>,
}

/// Encodes every cell, flattens its density matrix and projects it onto the
/// two leading principal components of this encoder/dataset pair.
pub fn comparison_map(encoder: &EncoderTemplate, grid: &LabeledGrid) -> Result<ComparisonMap> {
    let flattened = grid
        .points()
        .iter()
        .map(|p| {
            let state = encode_point(encoder, p.features())?;
            Ok(flatten_density(&DensityMatrix::from_state(&state)).into_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let model = fit_pca(&flattened)?;
    let g = grid.resolution();
    let points = flattened
        .iter()
        .zip(grid.points())
        .enumerate()
        .map(|(i, (v, p))| {
            let (x, y) = model.project(v);
            ComparisonPoint { x, y, label: p.label, row: i / g, col: i % g }
        })
        .collect();
    Ok(ComparisonMap { model, points })
}
