use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate geometry: atoms {m} and {n} coincide")]
    DegenerateGeometry { m: usize, n: usize },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("inconsistent eigenvalue {index}: residual {residual:.3e} exceeds tolerance")]
    InconsistentEigenvalue { index: usize, residual: f64 },

    #[error("eigenvector matrix is not invertible (condition estimate {condition:.3e})")]
    NonDiagonalizable { condition: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("invalid scenario at `{path}`: {message}")]
    Scenario { path: String, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 for validation problems, 3 for
    /// failed oracle or invariant checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InconsistentEigenvalue { .. } | Error::NonDiagonalizable { .. } | Error::InternalConsistency(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
