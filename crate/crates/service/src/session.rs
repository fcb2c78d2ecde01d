//! In-memory training sessions: one trainer thread per session, an
//! append-only event log, and the shared run-state table.

use std::collections::HashMap;
use std::convert::Infallible;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use encoder_lens_core::control::{
    self, control_channel, ControlAction, ControlHandle, ControlSignal, RunState, Transition,
};
use encoder_lens_core::training::{train, EpochRecord, TrainingConfig};
use serde::Serialize;
use serde_json::json;
use tokio::sync::{oneshot, Notify};

use crate::error::ApiError;

const ACK_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Debug, Clone, Serialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub config: TrainingConfig,
    pub run_state: RunState,
    pub current_epoch: usize,
    pub loss: Option<f64>,
    pub accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ControlResponse {
    pub session_id: String,
    pub run_state: RunState,
    pub current_epoch: usize,
    /// The action was accepted but the session was already in the requested state.
    pub noop: bool,
}

/// Item read from a session's event log.
#[derive(Debug, Clone)]
pub enum LogEntry {
    Epoch { epoch: usize, data: Arc<str> },
    Done(Arc<str>),
}

struct Inner {
    run_state: RunState,
    current_epoch: usize,
    last_metrics: Option<(f64, f64)>,
    log: Vec<Arc<str>>,
    done: Option<Arc<str>>,
    control: Option<ControlHandle>,
    last_touched: Instant,
    error: Option<String>,
}

pub struct Session {
    id: String,
    config: TrainingConfig,
    inner: Mutex<Inner>,
    notify: Notify,
    snapshot_dir: Option<PathBuf>,
}

impl Session {
    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn summary(&self) -> SessionSummary {
        let mut inner = self.lock();
        inner.last_touched = Instant::now();
        SessionSummary {
            session_id: self.id.clone(),
            config: self.config.clone(),
            run_state: inner.run_state,
            current_epoch: inner.current_epoch,
            loss: inner.last_metrics.map(|m| m.0),
            accuracy: inner.last_metrics.map(|m| m.1),
            error: inner.error.clone(),
        }
    }

    pub fn run_state(&self) -> RunState {
        self.lock().run_state
    }

    /// Entry `index` of the event log, the terminal entry once the log is
    /// exhausted, or `None` while the run is still producing.
    pub fn entry(&self, index: usize) -> Option<LogEntry> {
        let inner = self.lock();
        if let Some(data) = inner.log.get(index) {
            return Some(LogEntry::Epoch { epoch: index + 1, data: data.clone() });
        }
        inner.done.clone().map(LogEntry::Done)
    }

    /// Resolves once the log or terminal state changes after this call.
    pub async fn wait_for(&self, index: usize) {
        let notified = self.notify.notified();
        tokio::pin!(notified);
        notified.as_mut().enable();
        {
            let inner = self.lock();
            if index < inner.log.len() || inner.done.is_some() {
                return;
            }
        }
        notified.await;
    }

    pub async fn control(self: &Arc<Self>, action: ControlAction) -> Result<ControlResponse, ApiError> {
        let mut pending_ack = None;
        let transition = {
            let mut inner = self.lock();
            inner.last_touched = Instant::now();
            let transition = control::transition(inner.run_state, action).map_err(|e| ApiError::Conflict {
                message: e.to_string(),
                run_state: inner.run_state,
                current_epoch: inner.current_epoch,
            })?;
            if let Transition::Changed { to, .. } = transition {
                match action {
                    ControlAction::Start => {
                        let (handle, listener) = control_channel();
                        inner.control = Some(handle);
                        self.clone().spawn_trainer(listener);
                    }
                    ControlAction::Pause | ControlAction::Stop => {
                        let signal =
                            if action == ControlAction::Pause { ControlSignal::Pause } else { ControlSignal::Stop };
                        if let Some(handle) = &inner.control {
                            let (tx, rx) = oneshot::channel();
                            if handle.send_with_ack(signal, move || {
                                let _ = tx.send(());
                            }) {
                                pending_ack = Some(rx);
                            }
                        }
                    }
                    ControlAction::Resume => {
                        if let Some(handle) = &inner.control {
                            handle.resume();
                        }
                    }
                }
                inner.run_state = to;
            }
            transition
        };
        if let Some(ack) = pending_ack {
            // an error means the trainer finished before reaching a boundary
            let _ = tokio::time::timeout(ACK_TIMEOUT, ack).await;
        }
        let inner = self.lock();
        Ok(ControlResponse {
            session_id: self.id.clone(),
            run_state: inner.run_state,
            current_epoch: inner.current_epoch,
            noop: matches!(transition, Transition::NoOp(_)),
        })
    }

    fn spawn_trainer(self: Arc<Self>, mut listener: control::ControlListener) {
        tokio::task::spawn_blocking(move || {
            let result = train(&self.config, &mut listener, |record| {
                self.publish(record);
                Ok::<_, Infallible>(())
            });
            drop(listener);
            self.complete(result);
        });
    }

    fn publish(&self, record: &EpochRecord) {
        let data: Arc<str> = serde_json::to_string(record).expect("records serialize").into();
        {
            let mut inner = self.lock();
            inner.log.push(data);
            inner.current_epoch = record.epoch;
            inner.last_metrics = Some((record.loss, record.accuracy));
            inner.last_touched = Instant::now();
        }
        self.notify.notify_waiters();
    }

    fn complete(&self, result: encoder_lens_core::Result<encoder_lens_core::training::TrainOutcome>) {
        let snapshot = {
            let mut inner = self.lock();
            match &result {
                Ok(outcome) if outcome.completed => {
                    // a pause that arrived after the last boundary cannot take effect
                    if inner.run_state == RunState::Paused {
                        inner.run_state = RunState::Running;
                    }
                    inner.run_state = control::finish(inner.run_state).unwrap_or(inner.run_state);
                }
                Ok(_) => inner.run_state = RunState::Stopped,
                Err(e) => {
                    tracing::warn!(session = %self.id, error = %e, "training run failed");
                    inner.error = Some(e.to_string());
                    inner.run_state = RunState::Stopped;
                }
            }
            inner.control = None;
            let (loss, accuracy) = inner.last_metrics.unzip();
            let done = json!({
                "session_id": self.id,
                "run_state": inner.run_state,
                "current_epoch": inner.current_epoch,
                "epochs": self.config.epochs,
                "loss": loss,
                "accuracy": accuracy,
                "error": inner.error,
            });
            inner.done = Some(done.to_string().into());
            self.snapshot_dir.as_ref().map(|dir| (dir.clone(), snapshot_json(&self.id, &self.config, &inner, done)))
        };
        self.notify.notify_waiters();
        if let Some((dir, body)) = snapshot {
            let path = dir.join(format!("session-{}.json", self.id));
            if let Err(e) = std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(&path, body)) {
                tracing::warn!(path = %path.display(), error = %e, "could not write session snapshot");
            }
        }
    }

    /// Requests a stop if the run is active; used on shutdown and expiry.
    fn stop_if_active(&self) -> bool {
        let mut inner = self.lock();
        match control::transition(inner.run_state, ControlAction::Stop) {
            Ok(Transition::Changed { to, .. }) => {
                inner.run_state = to;
                if let Some(handle) = &inner.control {
                    handle.stop();
                }
                true
            }
            _ => false,
        }
    }

    /// Ends the event stream of a session that never ran.
    fn close_stream(&self) {
        {
            let mut inner = self.lock();
            if inner.done.is_some() {
                return;
            }
            let done = json!({
                "session_id": self.id,
                "run_state": inner.run_state,
                "current_epoch": inner.current_epoch,
                "epochs": self.config.epochs,
                "reason": "shutdown",
            });
            inner.done = Some(done.to_string().into());
        }
        self.notify.notify_waiters();
    }

    fn idle_for(&self) -> Duration {
        self.lock().last_touched.elapsed()
    }

    fn is_settled(&self) -> bool {
        let inner = self.lock();
        inner.run_state == RunState::Created || inner.done.is_some()
    }
}

fn snapshot_json(id: &str, config: &TrainingConfig, inner: &Inner, done: serde_json::Value) -> String {
    let records: Vec<serde_json::Value> =
        inner.log.iter().map(|r| serde_json::from_str(r).expect("log holds valid JSON")).collect();
    json!({ "session_id": id, "config": config, "summary": done, "records": records }).to_string()
}

/// All live sessions, keyed by id.
pub struct SessionRegistry {
    sessions: Mutex<HashMap<String, Arc<Session>>>,
    snapshot_dir: Option<PathBuf>,
}

impl SessionRegistry {
    pub fn new(snapshot_dir: Option<PathBuf>) -> Self {
        Self { sessions: Mutex::new(HashMap::new()), snapshot_dir }
    }

    fn map(&self) -> MutexGuard<'_, HashMap<String, Arc<Session>>> {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn create(&self, config: TrainingConfig) -> Result<Arc<Session>, ApiError> {
        config.validate()?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Arc::new(Session {
            id: id.clone(),
            config,
            inner: Mutex::new(Inner {
                run_state: RunState::Created,
                current_epoch: 0,
                last_metrics: None,
                log: Vec::new(),
                done: None,
                control: None,
                last_touched: Instant::now(),
                error: None,
            }),
            notify: Notify::new(),
            snapshot_dir: self.snapshot_dir.clone(),
        });
        self.map().insert(id, session.clone());
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.map().get(id).cloned().ok_or_else(|| ApiError::unknown_session(id))
    }

    pub fn len(&self) -> usize {
        self.map().len()
    }

    pub fn is_empty(&self) -> bool {
        self.map().is_empty()
    }

    /// Drops sessions idle longer than `ttl`, stopping any that are still active.
    pub fn expire_idle(&self, ttl: Duration) -> usize {
        let mut map = self.map();
        let stale: Vec<String> = map.iter().filter(|(_, s)| s.idle_for() > ttl).map(|(id, _)| id.clone()).collect();
        for id in &stale {
            if let Some(session) = map.remove(id) {
                session.stop_if_active();
            }
        }
        stale.len()
    }

    /// Stops every active session and waits (bounded) for their final events.
    pub async fn shutdown(&self, wait: Duration) {
        let sessions: Vec<Arc<Session>> = self.map().values().cloned().collect();
        for s in &sessions {
            s.stop_if_active();
        }
        let deadline = Instant::now() + wait;
        while Instant::now() < deadline && !sessions.iter().all(|s| s.is_settled()) {
            tokio::time::sleep(Duration::from_millis(10)).await;
        }
        for s in &sessions {
            s.close_stream();
        }
    }
}
