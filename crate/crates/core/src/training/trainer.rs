use std::fmt::Display;

use serde::{Deserialize, Serialize};

use super::ansatz::AnsatzParams;
use super::metrics::{accuracy, loss};
use super::model::EncodedBatch;
use crate::control::{Checkpoint, ControlListener};
use crate::datasets::{self, DEFAULT_RESOLUTION, MAX_RESOLUTION, MIN_RESOLUTION};
use crate::encoding::{find_encoder, ExpectationGrid};
use crate::error::{Error, Result};

pub const MAX_EPOCHS: usize = 10_000;
pub const MIN_LEARNING_RATE: f64 = 1e-5;
pub const MAX_LEARNING_RATE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub dataset_id: String,
    pub encoder_id: String,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_epochs() -> usize {
    100
}

fn default_learning_rate() -> f64 {
    0.5
}

fn default_seed() -> u64 {
    7
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

impl TrainingConfig {
    pub fn new(dataset_id: impl Into<String>, encoder_id: impl Into<String>) -> Self {
        Self {
            dataset_id: dataset_id.into(),
            encoder_id: encoder_id.into(),
            epochs: default_epochs(),
            learning_rate: default_learning_rate(),
            seed: default_seed(),
            resolution: default_resolution(),
        }
    }

    /// Range checks plus catalog lookups for both ids.
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_EPOCHS).contains(&self.epochs) {
            return Err(Error::InvalidConfig(format!("epochs must be within 1..={MAX_EPOCHS}, got {}", self.epochs)));
        }
        // a zero rate is accepted as a frozen run
        if !(self.learning_rate == 0.0 || (MIN_LEARNING_RATE..=MAX_LEARNING_RATE).contains(&self.learning_rate)) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be within {MIN_LEARNING_RATE}..={MAX_LEARNING_RATE}, got {}",
                self.learning_rate
            )));
        }
        if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&self.resolution) {
            return Err(Error::InvalidConfig(format!(
                "resolution must be within {MIN_RESOLUTION}..={MAX_RESOLUTION}, got {}",
                self.resolution
            )));
        }
        find_encoder(&self.encoder_id)?;
        if !datasets::dataset_ids().any(|id| id == self.dataset_id) {
            return Err(Error::NotFound { kind: "dataset", id: self.dataset_id.clone() });
        }
        Ok(())
    }
}

/// Metrics and decision surface after one gradient step.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
    pub params_snapshot: AnsatzParams,
    pub trained_map: ExpectationGrid,
}

/// Wire form of an [`EpochRecord`]; parameters are only included on request.
#[derive(Debug, Serialize)]
pub struct EpochRecordView<'a> {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
    pub trained_map: Vec<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<&'a AnsatzParams>,
}

impl EpochRecord {
    pub fn view(&self, include_params: bool) -> EpochRecordView<'_> {
        EpochRecordView {
            epoch: self.epoch,
            loss: self.loss,
            accuracy: self.accuracy,
            trained_map: self.trained_map.rows().collect(),
            params: include_params.then_some(&self.params_snapshot),
        }
    }
}

impl Serialize for EpochRecord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.view(false).serialize(serializer)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Last emitted record, or the epoch-0 evaluation at the initial parameters
    /// if the run was stopped before its first epoch.
    pub last: EpochRecord,
    /// False when a stop signal ended the run early.
    pub completed: bool,
}

/// Full-batch gradient descent on the configured dataset/encoder pair.
///
/// Control signals are observed before every epoch. `emit` receives each
/// record in order; an error from it aborts the run with [`Error::Transport`].
pub fn train<E, F>(config: &TrainingConfig, control: &mut ControlListener, mut emit: F) -> Result<TrainOutcome>
where
    E: Display,
    F: FnMut(&EpochRecord) -> std::result::Result<(), E>,
{
    config.validate()?;
    let grid = datasets::generate(&config.dataset_id, config.resolution)?;
    let encoder = find_encoder(&config.encoder_id)?;
    let batch = EncodedBatch::new(encoder, &grid)?;
    let resolution = grid.resolution();

    let mut params = AnsatzParams::random(config.seed);
    let mut outputs = batch.outputs(&params)?;
    let record = |epoch: usize, params: AnsatzParams, outputs: &[f64]| -> Result<EpochRecord> {
        Ok(EpochRecord {
            epoch,
            loss: loss(outputs, batch.labels())?,
            accuracy: accuracy(outputs, batch.labels())?,
            params_snapshot: params,
            trained_map: ExpectationGrid::new(resolution, outputs.to_vec())?,
        })
    };
    let mut last = record(0, params, &outputs)?;

    for epoch in 1..=config.epochs {
        if control.checkpoint() == Checkpoint::Stop {
            return Ok(TrainOutcome { last, completed: false });
        }
        let grad = batch.gradient(&params, &outputs)?;
        params = params.descend(config.learning_rate, &grad);
        outputs = batch.outputs(&params)?;
        last = record(epoch, params, &outputs)?;
        emit(&last).map_err(|e| Error::Transport(e.to_string()))?;
    }
    Ok(TrainOutcome { last, completed: true })
}
