use thiserror::Error;

use crate::expr::{DomainError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Domain(#[from] DomainError),

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("singular tetrad: |det h| = {det:e}")]
    SingularTetrad { det: f64 },

    #[error("singular metric: |det g| = {det:e}")]
    SingularMetric { det: f64 },

    #[error("unknown catalog tetrad `{name}` (valid: {valid})")]
    UnknownTetrad { name: String, valid: String },

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("invalid tetrad spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty sampling domain: {0}")]
    EmptyDomain(String),

    #[error("invalid suite config: {0}")]
    Config(String),

    #[error("unknown check `{name}` (valid: {valid})")]
    UnknownCheck { name: String, valid: String },

    #[error("unknown report format `{0}` (valid: json, csv, text)")]
    UnknownFormat(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
