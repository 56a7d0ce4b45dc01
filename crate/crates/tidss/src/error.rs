use std::path::PathBuf;

use tidss_core::catalog::ActionError;
use tidss_core::fusion::FusionError;
use tidss_core::metrics::MetricsError;
use tidss_core::orchestrate::OrchestrateError;
use tidss_core::plan::PlanError;
use tidss_core::synthesis::{SchemaError, SynthesisError};
use tidss_core::topsis::TopsisError;

use crate::ingest::IngestError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("fixture missing: {0}")]
    FixtureMissing(PathBuf),
    #[error("configuration: {0}")]
    Config(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Topsis(#[from] TopsisError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Orchestrate(#[from] OrchestrateError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
