use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pressure law evaluated outside its domain: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("hypothesis {hypothesis} violated: {detail}")]
    Hypothesis { hypothesis: String, detail: String },

    #[error("config parse error in [{section}] at line {line}: {message}")]
    Parse {
        section: String,
        line: usize,
        message: String,
    },

    #[error("CFL violation: outflow number {number:.6} exceeds 1 at cell {cell}")]
    Cfl { number: f64, cell: usize },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("Newton iteration failed after {halvings} dt halvings (last residual {residual:.3e})")]
    Newton { halvings: usize, residual: f64 },

    #[error("non-finite value in field {field}")]
    NonFinite { field: &'static str },

    #[error("state invariant violated: {0}")]
    Invariant(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid continuation plan: {0}")]
    Plan(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for rejected input, 3 for a solver abort,
    /// 4 for IO failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis { .. } | Error::InvalidParams(_) | Error::Parse { .. } | Error::Plan(_) | Error::GridMismatch(_) => 2,
            Error::Io { .. } => 4,
            _ => 3,
        }
    }

    pub(crate) fn hypothesis(name: &str, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            hypothesis: name.to_string(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
