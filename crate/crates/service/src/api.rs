use std::convert::Infallible;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::IntoResponse;
use axum::Json;
use encoder_lens_core::analysis::{comparison_map, separation_score};
use encoder_lens_core::control::ControlAction;
use encoder_lens_core::datasets::{self, list_datasets, DEFAULT_RESOLUTION};
use encoder_lens_core::encoding::{encoder_catalog, encoder_map, evolution, find_encoder};
use encoder_lens_core::training::TrainingConfig;
use futures::Stream;
use serde::Deserialize;
use serde_json::json;

use crate::error::ApiError;
use crate::session::{LogEntry, Session};
use crate::AppState;

pub const HEARTBEAT: Duration = Duration::from_secs(15);

/// Static catalog bodies, serialized once.
pub struct Catalogs {
    pub datasets: Bytes,
    pub encoders: Bytes,
}

impl Catalogs {
    pub fn build() -> Self {
        let datasets: Vec<serde_json::Value> = list_datasets()
            .into_iter()
            .map(|info| {
                let grid = datasets::generate(info.id, DEFAULT_RESOLUTION).expect("catalog ids are valid");
                let mut value = serde_json::to_value(&grid).expect("grids serialize");
                value["description"] = json!(info.description);
                value
            })
            .collect();
        Self {
            datasets: serde_json::to_vec(&datasets).expect("catalog serializes").into(),
            encoders: serde_json::to_vec(encoder_catalog()).expect("catalog serializes").into(),
        }
    }
}

fn json_bytes(body: Bytes) -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "application/json")], body)
}

pub async fn get_datasets(State(state): State<AppState>) -> impl IntoResponse {
    json_bytes(state.catalogs.datasets.clone())
}

pub async fn get_encoders(State(state): State<AppState>) -> impl IntoResponse {
    json_bytes(state.catalogs.encoders.clone())
}

#[derive(Debug, Deserialize)]
pub struct AnalysisQuery {
    dataset: Option<String>,
    encoder: Option<String>,
    resolution: Option<String>,
}

struct AnalysisInput {
    grid: datasets::LabeledGrid,
    encoder: &'static encoder_lens_core::encoding::EncoderTemplate,
}

impl AnalysisQuery {
    fn resolve(self) -> Result<AnalysisInput, ApiError> {
        let encoder_id =
            self.encoder.ok_or_else(|| ApiError::bad_request("missing_parameter", "`encoder` is required"))?;
        let dataset_id =
            self.dataset.ok_or_else(|| ApiError::bad_request("missing_parameter", "`dataset` is required"))?;
        let resolution = match self.resolution {
            None => DEFAULT_RESOLUTION,
            Some(raw) => raw.parse().map_err(|_| {
                ApiError::bad_request("bad_resolution", format!("resolution `{raw}` is not an integer"))
            })?,
        };
        let encoder = find_encoder(&encoder_id)?;
        let grid = datasets::generate(&dataset_id, resolution).map_err(|e| match e {
            encoder_lens_core::Error::InvalidConfig(msg) => ApiError::bad_request("bad_resolution", msg),
            other => other.into(),
        })?;
        Ok(AnalysisInput { grid, encoder })
    }
}

async fn compute<T: Send + 'static>(
    query: AnalysisQuery,
    f: impl FnOnce(AnalysisInput) -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    let input = query.resolve()?;
    tokio::task::spawn_blocking(move || f(input)).await.map_err(|e| ApiError::Internal(e.to_string()))?
}

pub async fn get_encoder_map(Query(query): Query<AnalysisQuery>) -> Result<Json<serde_json::Value>, ApiError> {
    compute(query, |AnalysisInput { grid, encoder }| {
        let map = encoder_map(encoder, &grid)?;
        Ok(Json(json!({
            "dataset": grid.id(),
            "encoder": encoder.id(),
            "resolution": map.resolution(),
            "values": map.rows().collect::<Vec<_>>(),
        })))
    })
    .await
}

pub async fn get_evolution(Query(query): Query<AnalysisQuery>) -> Result<Json<serde_json::Value>, ApiError> {
    compute(query, |AnalysisInput { grid, encoder }| {
        let frames = evolution(encoder, &grid)?;
        Ok(Json(json!({
            "dataset": grid.id(),
            "encoder": encoder.id(),
            "resolution": grid.resolution(),
            "frames": frames,
        })))
    })
    .await
}

pub async fn get_comparison_map(Query(query): Query<AnalysisQuery>) -> Result<Json<serde_json::Value>, ApiError> {
    compute(query, |AnalysisInput { grid, encoder }| {
        let map = comparison_map(encoder, &grid)?;
        let score = separation_score(&map.points).ok();
        Ok(Json(json!({
            "dataset": grid.id(),
            "encoder": encoder.id(),
            "resolution": grid.resolution(),
            "model": map.model,
            "points": map.points,
            "separation_score": score,
        })))
    })
    .await
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(v)| v).map_err(|e| ApiError::bad_request("bad_request", e.body_text()))
}

pub async fn create_session(
    State(state): State<AppState>,
    payload: Result<Json<TrainingConfig>, JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let session = state.sessions.create(body(payload)?)?;
    let summary = session.summary();
    Ok((
        StatusCode::CREATED,
        Json(json!({
            "session_id": summary.session_id,
            "run_state": summary.run_state,
            "current_epoch": summary.current_epoch,
        })),
    ))
}

#[derive(Debug, Deserialize)]
pub struct ControlBody {
    action: ControlAction,
}

pub async fn control_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<ControlBody>, JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let session = state.sessions.get(&id)?;
    let action = body(payload)?.action;
    Ok(Json(session.control(action).await?))
}

pub async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(state.sessions.get(&id)?.summary()))
}

/// Backlog replay followed by live epochs, then a single `done` event.
pub fn event_stream(session: Arc<Session>) -> impl Stream<Item = Result<Event, Infallible>> {
    futures::stream::unfold(Some((session, 0usize)), |cursor| async move {
        let (session, index) = cursor?;
        loop {
            match session.entry(index) {
                Some(LogEntry::Epoch { epoch, data }) => {
                    let event = Event::default().event("epoch").id(epoch.to_string()).data(&*data);
                    return Some((Ok(event), Some((session, index + 1))));
                }
                Some(LogEntry::Done(data)) => {
                    return Some((Ok(Event::default().event("done").data(&*data)), None));
                }
                None => session.wait_for(index).await,
            }
        }
    })
}

pub async fn session_events(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<impl IntoResponse, ApiError> {
    let session = state.sessions.get(&id)?;
    Ok(Sse::new(event_stream(session)).keep_alive(KeepAlive::new().interval(HEARTBEAT).text("heartbeat")))
}
