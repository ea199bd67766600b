use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("action {action} out of range for {n_cells} cells")]
    InvalidAction { action: usize, n_cells: usize },

    #[error("episode already finished; call reset first")]
    EpisodeFinished,

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("search budget exceeded: {count} evaluations requested, cap is {cap}")]
    BudgetExceeded { count: u128, cap: u128 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag used in the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidConfig(_) => "invalid_config",
            Error::DegenerateGeometry(_) => "degenerate_geometry",
            Error::NumericalFailure(_) => "numerical_failure",
            Error::InvalidPattern(_) => "invalid_pattern",
            Error::InvalidAction { .. } => "invalid_action",
            Error::EpisodeFinished => "episode_finished",
            Error::Diverged(_) => "diverged",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::TomlDe(_) | Error::TomlSer(_) => "toml",
            Error::Csv(_) => "csv",
        }
    }
}
