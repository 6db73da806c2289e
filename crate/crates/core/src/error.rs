use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadrature did not converge: estimate {estimate:e}, achieved error {achieved:e}, requested {requested:e}")]
    NoConvergence {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("spectral series truncated too early: partial sum {partial:e}, last shell {last_shell:e} exceeds tolerance {tol:e}")]
    Truncation {
        partial: f64,
        last_shell: f64,
        tol: f64,
    },

    #[error("kernel evaluated on the diagonal x = y")]
    Diagonal,

    #[error("measure is not admissible: the integral of exp(-t(2d+2|alpha|)) d|nu|(t) must be finite ({0})")]
    Inadmissible(String),

    #[error("unsupported derivative order: |n| + 2m = {0} exceeds 4")]
    UnsupportedOrder(usize),

    #[error("quadrature rule has the wrong domain: expected {expected}, got {got}")]
    RuleMismatch { expected: String, got: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
