use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by grid operations, solvers, analytics and experiment
/// orchestration.
#[derive(Debug, Error)]
pub enum SpdeError {
    /// Invalid configuration (bad grid size, step count, preset name, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The operation is only defined for some torus dimensions.
    #[error("unsupported dimension {0}: only d=1 and d=2 grids are available")]
    UnsupportedDimension(usize),

    /// A spectral field fed to an inverse transform is not the transform of
    /// real data.
    #[error("spectral field violates conjugate symmetry: {0}")]
    SymmetryViolation(String),

    /// Argument outside the mathematical domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A solver or fit produced a non-finite or otherwise unusable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// File I/O failure, annotated with the offending path.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SpdeError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SpdeError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, SpdeError>;
