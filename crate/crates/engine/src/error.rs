//! Error types shared across the engine.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("map syntax error at line {line}: {msg}")]
    MapSyntax { line: usize, msg: String },

    #[error("map invariant violation: {0}")]
    MapInvariant(String),

    #[error("unknown province `{0}`")]
    UnknownProvince(String),

    #[error("unknown power `{0}`")]
    UnknownPower(String),

    #[error("order syntax error: {0}")]
    OrderSyntax(String),

    #[error("no {kind} at {province}")]
    NoSuchUnit { kind: &'static str, province: String },

    #[error("state syntax error at line {line}: {msg}")]
    StateSyntax { line: usize, msg: String },

    #[error("state invariant violation: {0}")]
    StateInvariant(String),

    #[error("expected a {expected} phase, state is in {found}")]
    WrongPhase {
        expected: &'static str,
        found: &'static str,
    },

    #[error("case file error at line {line}: {msg}")]
    CaseSyntax { line: usize, msg: String },

    #[error("no bundled map named `{0}`")]
    UnknownMap(String),

    #[error("supply-center counts are all zero")]
    NoCenters,
}
