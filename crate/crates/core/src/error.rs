use thiserror::Error;

/// Errors raised by instance construction, the oracles and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed instance: {0}")]
    Malformed(String),

    #[error("edge {index}: vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { index: usize, vertex: usize, n: usize },

    #[error("edge {index}: self-loop on vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },

    #[error("edge {index}: duplicate edge ({u}, {v})")]
    DuplicateEdge { index: usize, u: usize, v: usize },

    #[error("edge {index}: weight {weight} is negative or not finite")]
    InvalidWeight { index: usize, weight: f64 },

    #[error("vertex-count mismatch: instance has {expected} vertices, solution covers {found}")]
    VertexCountMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("instance too large for exhaustive enumeration: {what} = {value} exceeds cap {cap}")]
    SizeCap {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("solver failed to converge: {message}")]
    SolverFailure { message: String, residuals: Residuals },

    #[error("instance generation failed: {0}")]
    GenerationFailed(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Numeric state carried by a solver failure.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Residuals {
    pub primal_infeasibility: f64,
    pub constraint_violation: f64,
    pub gap: f64,
    pub iterations: usize,
}

pub type Result<T> = std::result::Result<T, Error>;
