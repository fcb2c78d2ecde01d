use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use encoder_lens_core::training::TrainingConfig;
use encoder_lens_service::DEFAULT_PORT;

/// Train and inspect two-qubit angle-encoder classifiers.
///
/// Every flag can also be set through an `ENCODER_LENS_<FLAG>` environment
/// variable, e.g. `ENCODER_LENS_EPOCHS=200`.
#[derive(Debug, Parser)]
#[command(name = "encoder-lens", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one dataset/encoder pair and export its artifacts.
    Run(RunArgs),
    /// Train every dataset/encoder pair and write a ranked report.
    Sweep(SweepArgs),
    /// Start the HTTP/SSE session service.
    Serve(ServeArgs),
    /// Print the dataset and encoder catalogs as JSON.
    Catalog,
}

#[derive(Debug, Clone, Args)]
pub struct HyperArgs {
    #[arg(long, env = "ENCODER_LENS_EPOCHS", default_value_t = 100)]
    pub epochs: usize,
    #[arg(long = "lr", env = "ENCODER_LENS_LR", default_value_t = 0.5)]
    pub learning_rate: f64,
    #[arg(long, env = "ENCODER_LENS_SEED", default_value_t = 7)]
    pub seed: u64,
    /// Grid cells per side.
    #[arg(long, env = "ENCODER_LENS_RESOLUTION", default_value_t = 16)]
    pub resolution: usize,
    /// Stop a run once its accuracy reaches this value (off by default).
    #[arg(long, env = "ENCODER_LENS_TARGET_ACCURACY")]
    pub target_accuracy: Option<f64>,
}

impl HyperArgs {
    pub fn config(&self, dataset_id: &str, encoder_id: &str, seed: u64) -> TrainingConfig {
        TrainingConfig {
            dataset_id: dataset_id.to_string(),
            encoder_id: encoder_id.to_string(),
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            seed,
            resolution: self.resolution,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, env = "ENCODER_LENS_DATASET")]
    pub dataset: String,
    #[arg(long, env = "ENCODER_LENS_ENCODER")]
    pub encoder: String,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Output directory, created if missing.
    #[arg(long, env = "ENCODER_LENS_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[arg(long, env = "ENCODER_LENS_OUT")]
    pub out: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = "ENCODER_LENS_PARALLELISM")]
    pub parallelism: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, env = "ENCODER_LENS_PORT", default_value_t = DEFAULT_PORT)]
    pub port: u16,
    #[arg(long, env = "ENCODER_LENS_HOST", default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Built web UI to serve under `/`.
    #[arg(long, env = "ENCODER_LENS_STATIC_DIR")]
    pub static_dir: Option<PathBuf>,
    /// Write a JSON snapshot of every session when it ends.
    #[arg(long, env = "ENCODER_LENS_SNAPSHOT_DIR")]
    pub snapshot_dir: Option<PathBuf>,
    /// Only this origin may call the API from a browser; any origin when unset.
    #[arg(long, env = "ENCODER_LENS_CORS_ORIGIN")]
    pub cors_origin: Option<String>,
    /// Idle minutes before a session is dropped.
    #[arg(long, env = "ENCODER_LENS_SESSION_TTL", default_value_t = 30)]
    pub session_ttl: u64,
}
