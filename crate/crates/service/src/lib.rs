//! HTTP service over the encoder-lens engine.
//!
//! Catalog and analysis endpoints are computed per request; training runs
//! live in sessions that are steered with control actions and observed
//! through a server-sent event stream that replays the backlog on connect.

mod api;
mod error;
pub mod session;

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::http::HeaderValue;
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::services::ServeDir;

pub use api::{Catalogs, HEARTBEAT};
pub use error::ApiError;
pub use session::{ControlResponse, Session, SessionRegistry, SessionSummary};

pub const DEFAULT_PORT: u16 = 8642;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Sessions untouched for this long are dropped (active ones are stopped first).
    pub session_ttl: Duration,
    /// When set, each finished or stopped session is dumped here as JSON.
    pub snapshot_dir: Option<PathBuf>,
    /// Built UI bundle served under `/`.
    pub static_dir: Option<PathBuf>,
    /// Allowed CORS origin; any origin when unset.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { session_ttl: Duration::from_secs(30 * 60), snapshot_dir: None, static_dir: None, cors_origin: None }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub sessions: Arc<SessionRegistry>,
    pub catalogs: Arc<Catalogs>,
}

impl AppState {
    pub fn new(config: &ServiceConfig) -> Self {
        Self {
            sessions: Arc::new(SessionRegistry::new(config.snapshot_dir.clone())),
            catalogs: Arc::new(Catalogs::build()),
        }
    }
}

pub fn router(state: AppState, config: &ServiceConfig) -> Router {
    let cors = match config.cors_origin.as_deref().and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(origin) => CorsLayer::new().allow_origin(AllowOrigin::exact(origin)),
        None => CorsLayer::new().allow_origin(Any),
    }
    .allow_methods(Any)
    .allow_headers(Any);

    let api = Router::new()
        .route("/api/datasets", get(api::get_datasets))
        .route("/api/encoders", get(api::get_encoders))
        .route("/api/encoder-map", get(api::get_encoder_map))
        .route("/api/evolution", get(api::get_evolution))
        .route("/api/comparison-map", get(api::get_comparison_map))
        .route("/api/sessions", post(api::create_session))
        .route("/api/sessions/{id}", get(api::get_session))
        .route("/api/sessions/{id}/control", post(api::control_session))
        .route("/api/sessions/{id}/events", get(api::session_events))
        .with_state(state);

    let app = match &config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(cors)
}

/// Serves until `shutdown` resolves, then stops active sessions so their
/// streams close with a `done` event.
pub async fn serve(
    listener: TcpListener,
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let state = AppState::new(&config);
    let app = router(state.clone(), &config);

    let sessions = state.sessions.clone();
    let ttl = config.session_ttl;
    let reaper = tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60).min(ttl));
        loop {
            tick.tick().await;
            let dropped = sessions.expire_idle(ttl);
            if dropped > 0 {
                tracing::info!(dropped, "expired idle sessions");
            }
        }
    });

    let sessions = state.sessions.clone();
    let result = axum::serve(listener, app)
        .with_graceful_shutdown(async move {
            shutdown.await;
            tracing::info!("shutting down, stopping active sessions");
            sessions.shutdown(Duration::from_secs(5)).await;
        })
        .await;
    reaper.abort();
    result
}

pub async fn bind(addr: SocketAddr) -> std::io::Result<TcpListener> {
    TcpListener::bind(addr).await
}
