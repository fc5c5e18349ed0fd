//! Error types shared across the solver.

use thiserror::Error;

use entente_engine::EngineError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("all supply-center counts are zero")]
    AllZeroCounts,
    #[error("joint action is not covered by the anchor: {0}")]
    IllegalJoint(String),
    #[error("anchor table line {line}: {msg}")]
    TableSyntax { line: usize, msg: String },
    #[error("cannot read anchor table {path}: {source}")]
    TableRead { path: String, source: std::io::Error },
    #[error("anchor assigns zero probability to an action")]
    ZeroAnchorProbability,
    #[error("shape mismatch: {0}")]
    Shape(String),
}
