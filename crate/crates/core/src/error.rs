use std::path::PathBuf;

use thiserror::Error;

use crate::driver::ModeSet;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric positive definite ({context})")]
    NotSpd { context: &'static str },

    #[error("{context} did not converge within {iterations} iterations")]
    MaxIterations { context: &'static str, iterations: usize },

    #[error("degenerate vector pair: |xi . eta| = {overlap:e}")]
    DegeneratePair { overlap: f64 },

    #[error("triangular factor has a zero diagonal entry at row {row}")]
    SingularFactor { row: usize },

    #[error("dense routine refused dimension {dim} (limit {limit})")]
    SizeGuard { dim: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },

    #[error("{0}: Matrix Market header is not 'coordinate real symmetric'")]
    NotSymmetricHeader(PathBuf),

    #[error("{path}: matrix is {rows}x{cols}, expected square")]
    NonSquare { path: PathBuf, rows: usize, cols: usize },

    #[error("restart budget exhausted after {restarts} restarts with {found} of {requested} modes converged")]
    RestartsExhausted {
        restarts: usize,
        found: usize,
        requested: usize,
        partial: Box<ModeSet>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
