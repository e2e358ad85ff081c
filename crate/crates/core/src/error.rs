use thiserror::Error;

/// Errors raised by grids, solvers and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid units: {0}")]
    Units(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("outside potential domain: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("inconsistent inputs: {0}")]
    Consistency(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("no classical orbit: {0}")]
    NoOrbit(String),
    #[error("not separable-stationary: {0}")]
    NotSeparable(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
