//! All dataset × encoder pairs under shared hyperparameters.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use encoder_lens_core::analysis::{comparison_map, separation_score};
use encoder_lens_core::datasets::{self, dataset_ids};
use encoder_lens_core::encoding::encoder_catalog;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::HyperArgs;
use crate::error::CliError;
use crate::run::train_pair;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub dataset_id: String,
    pub encoder_id: String,
    pub final_accuracy: f64,
    pub final_loss: f64,
    pub epochs_to_90pct: Option<usize>,
    pub separation_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub seed: u64,
    pub resolution: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub target_accuracy: Option<f64>,
    pub engine_version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub metadata: SweepMetadata,
    pub rows: Vec<SweepRow>,
}

/// Seed for one pair: first eight bytes of SHA-256 over the base seed and both ids.
pub fn pair_seed(base: u64, dataset_id: &str, encoder_id: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    hasher.update(dataset_id.as_bytes());
    hasher.update([0u8]);
    hasher.update(encoder_id.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

fn run_pair(hyper: &HyperArgs, dataset_id: &str, encoder_id: &str) -> Result<SweepRow, CliError> {
    let config = hyper.config(dataset_id, encoder_id, pair_seed(hyper.seed, dataset_id, encoder_id));
    let (last, _, epochs_to_90pct) = train_pair(&config, hyper.target_accuracy, |_| Ok(()))?;
    let grid = datasets::generate(dataset_id, hyper.resolution)?;
    let encoder = encoder_lens_core::encoding::find_encoder(encoder_id)?;
    let score = separation_score(&comparison_map(encoder, &grid)?.points).ok();
    Ok(SweepRow {
        dataset_id: dataset_id.to_string(),
        encoder_id: encoder_id.to_string(),
        final_accuracy: last.accuracy,
        final_loss: last.loss,
        epochs_to_90pct,
        separation_score: score,
    })
}

/// Runs every pair on a pool of `parallelism` threads (default: all cores).
pub fn sweep(hyper: &HyperArgs, parallelism: Option<usize>) -> Result<SweepReport, CliError> {
    if parallelism == Some(0) {
        return Err(CliError::Usage("--parallelism must be at least 1".into()));
    }
    hyper.config("D1-vstripes", "E01", hyper.seed).validate()?;

    let pairs: Vec<(&str, &str)> =
        dataset_ids().flat_map(|d| encoder_catalog().iter().map(move |e| (d, e.id()))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Engine(e.to_string()))?;
    let mut rows =
        pool.install(|| pairs.par_iter().map(|&(d, e)| run_pair(hyper, d, e)).collect::<Result<Vec<_>, _>>())?;

    rows.sort_by(|a, b| {
        a.dataset_id
            .cmp(&b.dataset_id)
            .then(b.final_accuracy.partial_cmp(&a.final_accuracy).unwrap_or(Ordering::Equal))
            .then_with(|| a.encoder_id.cmp(&b.encoder_id))
    });

    Ok(SweepReport {
        metadata: SweepMetadata {
            seed: hyper.seed,
            resolution: hyper.resolution,
            learning_rate: hyper.learning_rate,
            epochs: hyper.epochs,
            target_accuracy: hyper.target_accuracy,
            engine_version: encoder_lens_core::VERSION,
        },
        rows,
    })
}

impl SweepReport {
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            writer.serialize(row).map_err(|e| CliError::Engine(e.to_string()))?;
        }
        writer.into_inner().map_err(|e| CliError::Engine(e.to_string()))
    }

    /// Writes `sweep.csv` and `sweep.json` into `out`.
    pub fn write(&self, out: &Path) -> Result<(), CliError> {
        fs::create_dir_all(out).map_err(|e| CliError::io(format!("creating {}", out.display()), e))?;
        let csv_path = out.join("sweep.csv");
        fs::write(&csv_path, self.to_csv()?).map_err(|e| CliError::io(format!("writing {}", csv_path.display()), e))?;
        let json_path = out.join("sweep.json");
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Engine(e.to_string()))?;
        text.push('\n');
        fs::write(&json_path, text).map_err(|e| CliError::io(format!("writing {}", json_path.display()), e))
    }
}
