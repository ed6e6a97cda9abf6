use thiserror::Error;

/// Errors raised by the numerical kernels, model construction, fitting and I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge (best estimate {best:e}, error estimate {err_est:e})")]
    NonConvergence {
        what: &'static str,
        best: f64,
        err_est: f64,
    },

    #[error("degenerate fit: {0}")]
    Degenerate(String),

    #[error("invalid distribution spec `{input}`: {reason}")]
    InvalidSpec { input: String, reason: String },

    #[error("malformed sample: {0}")]
    Sample(#[from] SampleError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Sample parse and validation failures, one variant per cause.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("token {index} (`{token}`) is not a number")]
    NotANumber { index: usize, token: String },
    #[error("value {value} at position {index} is negative")]
    Negative { index: usize, value: f64 },
    #[error("value at position {index} is not finite")]
    NonFinite { index: usize },
    #[error("need at least 2 observations, got {0}")]
    TooSmall(usize),
    #[error("value {value} at position {index} is not an integer (discrete family requested)")]
    NotInteger { index: usize, value: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidSpec { .. } => 3,
            Error::Sample(_) => 4,
            Error::Domain(_) => 5,
            Error::NonConvergence { .. } => 6,
            Error::Degenerate(_) => 7,
            Error::Config(_) => 8,
            Error::Io(_) => 9,
        }
    }

    /// Stable machine-readable tag for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec { .. } => "invalid_spec",
            Error::Sample(_) => "malformed_sample",
            Error::Domain(_) => "domain",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Degenerate(_) => "degenerate_fit",
            Error::Config(_) => "invalid_config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
