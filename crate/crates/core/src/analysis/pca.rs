use serde::Serialize;

use super::eigen::symmetric_eigen;
use crate::error::{Error, Result};

/// Total variance at or below this is treated as a constant cloud.
const ZERO_VARIANCE: f64 = 1e-18;

/// Two-component PCA fitted by exact covariance eigendecomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaModel {
    #[serde(skip)]
    pub mean: Vec<f64>,
    #[serde(skip)]
    pub components: [Vec<f64>; 2],
    /// Variance along each component, descending.
    pub explained_variance: [f64; 2],
    /// Trace of the sample covariance.
    pub total_variance: f64,
    /// Zero-variance input; components fall back to the first two basis vectors.
    pub degenerate: bool,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn project(&self, vector: &[f64]) -> (f64, f64) {
        let coord = |c: &[f64]| vector.iter().zip(&self.mean).zip(c).map(|((x, m), w)| (x - m) * w).sum();
        (coord(&self.components[0]), coord(&self.components[1]))
    }
}

fn basis(dim: usize, index: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[index] = 1.0;
    v
}

/// Flips `v` so its largest-magnitude entry (first one on ties) is positive.
fn fix_sign(v: &mut [f64]) {
    let mut pivot = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[pivot].abs() {
            pivot = i;
        }
    }
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Fits the two leading principal components of `vectors` (sample covariance, `N - 1`).
pub fn fit_pca(vectors: &[Vec<f64>]) -> Result<PcaModel> {
    if vectors.len() < 3 {
        return Err(Error::Contract(format!("PCA needs at least 3 vectors, got {}", vectors.len())));
    }
    let dim = vectors[0].len();
    if dim < 2 {
        return Err(Error::Contract("PCA needs vectors of dimension >= 2".into()));
    }
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::Contract("PCA input vectors differ in length".into()));
    }

    let n = vectors.len() as f64;
    let mut mean = vec![0.0; dim];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let mut cov = vec![0.0; dim * dim];
    let mut centered = vec![0.0; dim];
    for v in vectors {
        for ((c, x), m) in centered.iter_mut().zip(v).zip(&mean) {
            *c = x - m;
        }
        for i in 0..dim {
            for j in i..dim {
                cov[i * dim + j] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let value = cov[i * dim + j] / (n - 1.0);
            cov[i * dim + j] = value;
            cov[j * dim + i] = value;
        }
    }
    let total_variance: f64 = (0..dim).map(|i| cov[i * dim + i]).sum();

    if total_variance <= ZERO_VARIANCE {
        return Ok(PcaModel {
            mean,
            components: [basis(dim, 0), basis(dim, 1)],
            explained_variance: [0.0, 0.0],
            total_variance,
            degenerate: true,
        });
    }

    let (values, mut vectors) = symmetric_eigen(&cov, dim);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut first = std::mem::take(&mut vectors[order[0]]);
    let mut second = std::mem::take(&mut vectors[order[1]]);
    fix_sign(&mut first);
    fix_sign(&mut second);

    Ok(PcaModel {
        mean,
        components: [first, second],
        explained_variance: [values[order[0]].max(0.0), values[order[1]].max(0.0)],
        total_variance,
        degenerate: false,
    })
}
