use thiserror::Error;

/// Every failure mode surfaced by the library.
///
/// The variants are coarse on purpose: the CLI maps them onto exit codes
/// (parameter/config, data, numerical).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is numerically singular: {0}")]
    Singular(String),

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("non-finite value while updating `{variable}`")]
    NonFinite { variable: String },

    #[error("empty data: {0}")]
    EmptyData(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("did not converge after {iterations} iterations (duality gap {gap:.3e})")]
    Convergence { iterations: usize, gap: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("moment undefined: {0}")]
    MomentUndefined(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            return Error::Io(e.to_string());
        }
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parameter(_) | Error::Unsupported(_) => ErrorKind::Config,
            Error::Dimension(_)
            | Error::EmptyData(_)
            | Error::Degenerate(_)
            | Error::Io(_)
            | Error::Parse(_) => ErrorKind::Data,
            Error::Singular(_)
            | Error::NotSpd(_)
            | Error::NonFinite { .. }
            | Error::Convergence { .. }
            | Error::Consistency(_)
            | Error::MomentUndefined(_) => ErrorKind::Numerical,
        }
    }
}
