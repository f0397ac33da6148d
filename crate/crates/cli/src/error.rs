use thiserror::Error;

use magheat_core::MagheatError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },

    #[error("{experiment}: {source}")]
    Experiment {
        experiment: &'static str,
        #[source]
        source: MagheatError,
    },

    #[error(transparent)]
    Core(#[from] MagheatError),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("unknown sweep axis `{0}` (flux, R, grid, ds)")]
    SweepAxis(String),
}

impl CliError {
    pub fn invalid(key: &'static str, reason: String) -> Self {
        Self::Invalid { key, reason }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
