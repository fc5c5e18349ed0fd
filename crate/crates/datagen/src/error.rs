//! Failure modes of prompt encoding and dataset emission.

use entente_engine::EngineError;
use entente_solver::SolverError;
use thiserror::Error;

/// Anything that can go wrong while turning searched positions into records.
#[derive(Debug, Error)]
pub enum DatagenError {
    /// A rule or map failure bubbled up from the game engine.
    #[error(transparent)]
    Engine(#[from] EngineError),

    /// A search failure bubbled up from the solver.
    #[error(transparent)]
    Solver(#[from] SolverError),

    /// The record sink rejected a write.
    #[error("dataset write failed: {0}")]
    Io(#[from] std::io::Error),

    /// The joint action to label is missing from the search's candidate
    /// list, so it has no value to export.
    #[error("selected joint action is not among the search candidates")]
    SelectedNotCandidate,

    /// The candidate menus and the selected joint action describe different
    /// unit sets.
    #[error("per-unit menus do not match the selected action: {0}")]
    MenuMismatch(String),

    /// A record's text exceeds the sequence budget.
    #[error("record of {chars} characters exceeds the {budget}-character budget")]
    PromptBudget {
        /// Characters across the system, user, assistant and value fields.
        chars: usize,
        /// Maximum characters allowed per record.
        budget: usize,
    },

    /// A unit value was NaN or infinite and cannot be exported.
    #[error("unit value {0} is not finite")]
    NonFiniteValue(f64),

    /// A line did not parse against the record schema.
    #[error("record does not match the dataset schema: {0}")]
    Schema(String),
}
