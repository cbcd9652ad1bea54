use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    OutOfRange { vertex: VertexId, n: usize },

    #[error("empty vertex set")]
    EmptySet,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("Katz attenuation {alpha} is not below the spectral radius bound 1/{bound}")]
    AlphaDiverges { alpha: f64, bound: f64 },

    #[error("linear solve failed: {0}")]
    SolveFailure(String),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("kernel shift epsilon + lambda_min = {shift} is not positive")]
    NonPositiveShift { shift: f64 },

    #[error("vertex {0} is not covered by any subdomain")]
    UncoveredVertex(VertexId),

    #[error("community {0} has no interpolation nodes")]
    NoSamples(usize),

    #[error("signal file has no value for vertex {0}")]
    MissingSignalValue(VertexId),

    #[error("reference signal has zero norm")]
    ZeroSignal,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical engine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::AlphaDiverges { .. }
                | Error::SolveFailure(_)
                | Error::NoConvergence(_)
                | Error::NotPositiveDefinite { .. }
                | Error::NonPositiveShift { .. }
                | Error::NotSymmetric { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
