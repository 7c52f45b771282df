//! Crate-wide error types.

use std::path::PathBuf;

/// Top-level error for simulation, experiment, and analysis operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration (bad field values, unknown presets, missing keys).
    #[error("configuration error: {0}")]
    Config(String),

    /// A decision backend failed in a way the engine cannot recover from.
    #[error(transparent)]
    Backend(#[from] BackendError),

    /// A checkpoint could not be written or read back.
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),

    /// Malformed analysis input or a degenerate statistical problem.
    #[error("analysis error: {0}")]
    Analytics(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn analytics(msg: impl Into<String>) -> Self {
        Error::Analytics(msg.into())
    }
}

/// Failure modes of a decision backend call.
#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    /// The endpoint rejected the request with a status that must not be retried.
    #[error("non-retryable response from endpoint: HTTP {status}: {body}")]
    NonRetryable { status: u16, body: String },

    /// All retry attempts were used up without a successful response.
    #[error("retry attempts exhausted after {attempts} tries: {last_error}")]
    AttemptsExhausted { attempts: u32, last_error: String },

    /// The endpoint answered 2xx but the payload did not match the wire format.
    #[error("malformed response payload: {0}")]
    MalformedResponse(String),

    /// Client-side misconfiguration (missing API key, bad URL).
    #[error("backend configuration error: {0}")]
    Config(String),

    #[error("cache error: {0}")]
    Cache(String),
}

/// Checkpoint save/load failures.
#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("cannot write checkpoint {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot read checkpoint {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    /// The file exists but does not parse; `detail` names the offending field.
    #[error("corrupt checkpoint {path}: {detail}")]
    Corrupt { path: PathBuf, detail: String },

    /// The file parses but was written by an incompatible schema version.
    #[error(
        "checkpoint {path} has schema version {found}, expected {expected}; \
         migrate the file before resuming"
    )]
    VersionMismatch {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
}
