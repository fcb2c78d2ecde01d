//! Single-configuration runs and their artifact files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use encoder_lens_core::analysis::{comparison_map, separation_score};
use encoder_lens_core::control::{control_channel, ControlListener};
use encoder_lens_core::datasets;
use encoder_lens_core::encoding::{encoder_map, find_encoder};
use encoder_lens_core::training::{train, EpochRecord, TrainingConfig};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;

/// Accuracy that counts as "trained" for `epochs_to_90pct`.
pub const ACCURACY_MILESTONE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub config: TrainingConfig,
    pub epochs_run: usize,
    pub completed: bool,
    pub final_loss: f64,
    pub final_accuracy: f64,
    pub epochs_to_90pct: Option<usize>,
    pub separation_score: Option<f64>,
    pub engine_version: &'static str,
}

/// Trains `config`, passing every record to `on_epoch`. With a target the
/// run stops at the first epoch whose accuracy reaches it.
pub fn train_pair(
    config: &TrainingConfig,
    target_accuracy: Option<f64>,
    mut on_epoch: impl FnMut(&EpochRecord) -> Result<(), CliError>,
) -> Result<(EpochRecord, bool, Option<usize>), CliError> {
    if let Some(t) = target_accuracy {
        if !(0.0..=1.0).contains(&t) {
            return Err(CliError::Usage(format!("--target-accuracy must lie in [0, 1], got {t}")));
        }
    }
    let (handle, mut listener) = match target_accuracy {
        Some(_) => {
            let (h, l) = control_channel();
            (Some(h), l)
        }
        None => (None, ControlListener::detached()),
    };
    let mut milestone = None;
    let mut failure = None;
    let outcome = train(config, &mut listener, |record| {
        if milestone.is_none() && record.accuracy >= ACCURACY_MILESTONE {
            milestone = Some(record.epoch);
        }
        if let Err(e) = on_epoch(record) {
            let msg = e.to_string();
            failure = Some(e);
            return Err(msg);
        }
        if let (Some(h), Some(t)) = (&handle, target_accuracy) {
            if record.accuracy >= t {
                h.stop();
            }
        }
        Ok(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let outcome = outcome?;
    Ok((outcome.last, outcome.completed, milestone))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Engine(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

/// Writes `epochs.jsonl`, `encoder_map.json`, `comparison_map.json` and
/// `summary.json` into `out`.
pub fn run(config: &TrainingConfig, target_accuracy: Option<f64>, out: &Path) -> Result<RunSummary, CliError> {
    config.validate()?;
    let encoder = find_encoder(&config.encoder_id)?;
    let grid = datasets::generate(&config.dataset_id, config.resolution)?;

    fs::create_dir_all(out).map_err(|e| CliError::io(format!("creating {}", out.display()), e))?;
    let epochs_path = out.join("epochs.jsonl");
    let file =
        File::create(&epochs_path).map_err(|e| CliError::io(format!("creating {}", epochs_path.display()), e))?;
    let mut lines = BufWriter::new(file);
    let io_err = |e| CliError::io(format!("writing {}", epochs_path.display()), e);

    let (last, completed, epochs_to_90pct) = train_pair(config, target_accuracy, |record| {
        serde_json::to_writer(&mut lines, &record.view(true)).map_err(|e| CliError::Engine(e.to_string()))?;
        lines.write_all(b"\n").map_err(io_err)
    })?;
    lines.flush().map_err(io_err)?;

    let map = encoder_map(encoder, &grid)?;
    write_json(
        &out.join("encoder_map.json"),
        &json!({
            "dataset": grid.id(),
            "encoder": encoder.id(),
            "resolution": map.resolution(),
            "values": map.rows().collect::<Vec<_>>(),
        }),
    )?;

    let comparison = comparison_map(encoder, &grid)?;
    let score = separation_score(&comparison.points).ok();
    write_json(
        &out.join("comparison_map.json"),
        &json!({
            "dataset": grid.id(),
            "encoder": encoder.id(),
            "resolution": grid.resolution(),
            "model": comparison.model,
            "points": comparison.points,
            "separation_score": score,
        }),
    )?;

    let summary = RunSummary {
        config: config.clone(),
        epochs_run: last.epoch,
        completed,
        final_loss: last.loss,
        final_accuracy: last.accuracy,
        epochs_to_90pct,
        separation_score: score,
        engine_version: encoder_lens_core::VERSION,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}
