//! Run-state transition table and the pause/resume/stop channel used by a
//! training run. The CLI and the session service share this table.

use std::fmt;
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunState {
    Created,
    Running,
    Paused,
    Stopped,
    Finished,
}

impl RunState {
    pub const ALL: [RunState; 5] =
        [RunState::Created, RunState::Running, RunState::Paused, RunState::Stopped, RunState::Finished];

    pub fn is_terminal(self) -> bool {
        matches!(self, RunState::Stopped | RunState::Finished)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RunState::Created => "created",
            RunState::Running => "running",
            RunState::Paused => "paused",
            RunState::Stopped => "stopped",
            RunState::Finished => "finished",
        }
    }
}

impl fmt::Display for RunState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlAction {
    Start,
    Pause,
    Resume,
    Stop,
}

impl ControlAction {
    pub const ALL: [ControlAction; 4] =
        [ControlAction::Start, ControlAction::Pause, ControlAction::Resume, ControlAction::Stop];
}

impl fmt::Display for ControlAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ControlAction::Start => "start",
            ControlAction::Pause => "pause",
            ControlAction::Resume => "resume",
            ControlAction::Stop => "stop",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    Changed {
        from: RunState,
        to: RunState,
    },
    /// Pause while paused, resume while running.
    NoOp(RunState),
}

impl Transition {
    pub fn state(self) -> RunState {
        match self {
            Transition::Changed { to, .. } => to,
            Transition::NoOp(s) => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("cannot {action} a {state} run")]
pub struct IllegalTransition {
    pub state: RunState,
    pub action: ControlAction,
}

pub fn transition(state: RunState, action: ControlAction) -> Result<Transition, IllegalTransition> {
    use ControlAction as A;
    use RunState as S;
    let to = match (state, action) {
        (S::Created, A::Start) => S::Running,
        (S::Running, A::Pause) => S::Paused,
        (S::Paused, A::Resume) => S::Running,
        (S::Running | S::Paused, A::Stop) => S::Stopped,
        (S::Paused, A::Pause) | (S::Running, A::Resume) => return Ok(Transition::NoOp(state)),
        _ => return Err(IllegalTransition { state, action }),
    };
    Ok(Transition::Changed { from: state, to })
}

/// Natural completion of a run; only a running run can finish.
pub fn finish(state: RunState) -> Option<RunState> {
    (state == RunState::Running).then_some(RunState::Finished)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlSignal {
    Pause,
    Resume,
    Stop,
}

type Ack = Box<dyn FnOnce() + Send>;

struct Envelope {
    signal: ControlSignal,
    ack: Option<Ack>,
}

/// Sending half, held by whoever steers the run.
#[derive(Clone)]
pub struct ControlHandle {
    tx: mpsc::Sender<Envelope>,
}

impl ControlHandle {
    /// Returns false if the run has already ended.
    pub fn send(&self, signal: ControlSignal) -> bool {
        self.tx.send(Envelope { signal, ack: None }).is_ok()
    }

    /// Like [`send`](Self::send); `ack` runs once the run has acted on the
    /// signal at an epoch boundary. It is dropped uncalled if the run ends first.
    pub fn send_with_ack(&self, signal: ControlSignal, ack: impl FnOnce() + Send + 'static) -> bool {
        self.tx.send(Envelope { signal, ack: Some(Box::new(ack)) }).is_ok()
    }

    pub fn pause(&self) -> bool {
        self.send(ControlSignal::Pause)
    }

    pub fn resume(&self) -> bool {
        self.send(ControlSignal::Resume)
    }

    pub fn stop(&self) -> bool {
        self.send(ControlSignal::Stop)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Checkpoint {
    Continue,
    Stop,
}

/// Receiving half, owned by the training loop.
pub struct ControlListener {
    rx: mpsc::Receiver<Envelope>,
    paused: bool,
}

pub fn control_channel() -> (ControlHandle, ControlListener) {
    let (tx, rx) = mpsc::channel();
    (ControlHandle { tx }, ControlListener { rx, paused: false })
}

impl ControlListener {
    /// A listener nobody can signal; the run always continues.
    pub fn detached() -> Self {
        control_channel().1
    }

    /// Applies every pending signal. Blocks while paused until resumed or stopped.
    /// A paused run whose handles are all dropped stops.
    pub fn checkpoint(&mut self) -> Checkpoint {
        loop {
            let next = if self.paused {
                match self.rx.recv() {
                    Ok(env) => env,
                    Err(_) => return Checkpoint::Stop,
                }
            } else {
                match self.rx.try_recv() {
                    Ok(env) => env,
                    Err(_) => return Checkpoint::Continue,
                }
            };
            let Envelope { signal, ack } = next;
            match signal {
                ControlSignal::Pause => self.paused = true,
                ControlSignal::Resume => self.paused = false,
                ControlSignal::Stop => {
                    if let Some(ack) = ack {
                        ack();
                    }
                    return Checkpoint::Stop;
                }
            }
            if let Some(ack) = ack {
                ack();
            }
        }
    }
}
