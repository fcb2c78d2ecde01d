//! Headless driver for the encoder-lens engine: single runs, full sweeps
//! and the session service.

pub mod args;
mod error;
pub mod run;
pub mod sweep;

use std::net::SocketAddr;
use std::time::Duration;

use encoder_lens_core::datasets::{self, list_datasets};
use encoder_lens_core::encoding::encoder_catalog;
use encoder_lens_service::ServiceConfig;
use serde_json::json;

pub use args::{Cli, Command};
pub use error::CliError;

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let config = args.hyper.config(&args.dataset, &args.encoder, args.hyper.seed);
            let summary = run::run(&config, args.hyper.target_accuracy, &args.out)?;
            println!(
                "{} + {}: accuracy {:.4}, loss {:.6} after {} epochs -> {}",
                config.dataset_id,
                config.encoder_id,
                summary.final_accuracy,
                summary.final_loss,
                summary.epochs_run,
                args.out.display()
            );
            Ok(())
        }
        Command::Sweep(args) => {
            let report = sweep::sweep(&args.hyper, args.parallelism)?;
            report.write(&args.out)?;
            println!("{} rows -> {}", report.rows.len(), args.out.display());
            Ok(())
        }
        Command::Serve(args) => {
            let config = ServiceConfig {
                session_ttl: Duration::from_secs(args.session_ttl.max(1) * 60),
                snapshot_dir: args.snapshot_dir,
                static_dir: args.static_dir,
                cors_origin: args.cors_origin,
            };
            serve(SocketAddr::new(args.host, args.port), config)
        }
        Command::Catalog => {
            let datasets: Vec<_> = list_datasets()
                .into_iter()
                .map(|info| {
                    let grid = datasets::generate(info.id, datasets::DEFAULT_RESOLUTION).ok();
                    json!({
                        "id": info.id,
                        "display_name": info.display_name,
                        "description": info.description,
                        "positive_fraction": grid.map(|g| g.positive_fraction()),
                    })
                })
                .collect();
            let value = json!({ "datasets": datasets, "encoders": encoder_catalog() });
            println!("{}", serde_json::to_string_pretty(&value).map_err(|e| CliError::Engine(e.to_string()))?);
            Ok(())
        }
    }
}

fn serve(addr: SocketAddr, config: ServiceConfig) -> Result<(), CliError> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::io("starting runtime", e))?;
    runtime.block_on(async move {
        let listener =
            encoder_lens_service::bind(addr).await.map_err(|e| CliError::io(format!("binding {addr}"), e))?;
        let local = listener.local_addr().map_err(|e| CliError::io("reading listen address", e))?;
        tracing::info!(%local, "listening");
        println!("serving on http://{local}");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        encoder_lens_service::serve(listener, config, shutdown).await.map_err(|e| CliError::io("serving", e))
    })
}
