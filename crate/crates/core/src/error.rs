use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its allowed range (qubit count, resolution, learning rate, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A gate does not fit the register it is applied to.
    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("unknown {kind} `{id}`")]
    NotFound { kind: &'static str, id: String },

    /// Caller violated an operation's input contract (length mismatch, too few samples, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The per-epoch sink rejected a record; the run was aborted.
    #[error("transport error: {0}")]
    Transport(String),
}

impl Error {
    pub(crate) fn not_found(kind: &'static str, id: impl Into<String>) -> Self {
        Error::NotFound { kind, id: id.into() }
    }
}
