use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Model parameters outside their domain.
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    /// Bad argument to an operation (empty subset, out-of-range index, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// The requested median/expected pair admits no real drift dispersion.
    #[error("infeasible calibration target: {0}")]
    Calibration(String),

    /// Exhaustive enumeration would exceed the configured subset cap.
    #[error("enumeration of {count} portfolios exceeds the cap of {cap}")]
    Resource { count: u128, cap: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
