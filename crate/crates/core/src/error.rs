use thiserror::Error;

use crate::patterns::ForbidWitness;
use crate::term::{Position, Sort, Term};

#[derive(Debug, Error)]
pub enum Error {
    #[error("position {position} does not exist in {term}")]
    PositionOutOfRange { position: Position, term: String },

    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: Sort, found: Sort },

    #[error("symbol {symbol} expects {expected} arguments, got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid position `{0}`")]
    InvalidPosition(String),

    #[error("`{0}` is declared twice")]
    DuplicateDeclaration(String),

    #[error("unknown sort `{0}`")]
    UnknownSort(String),

    #[error("rule {lhs} -> {rhs}: {reason}")]
    InvalidRule {
        lhs: String,
        rhs: String,
        reason: &'static str,
    },

    #[error("symbol `{0}` is not part of the signature")]
    ForeignSymbol(String),

    #[error("no rule {rule_index} redex at position {position}")]
    InvalidRedex { position: Position, rule_index: usize },

    #[error("redex at position {position} is forbidden by pattern {}", witness.pattern_index)]
    ForbiddenRedex {
        position: Position,
        witness: ForbidWitness,
    },

    #[error("invalid replacement map: {0}")]
    InvalidReplacementMap(String),

    #[error("pattern {0} is not a here-pattern")]
    UnsupportedPatternMode(usize),

    #[error("pattern {0} is not linear")]
    NonLinearPattern(usize),

    #[error("transformation generated more than {0} rules")]
    TransformBudget(usize),

    #[error("budget exhausted after {steps} steps")]
    BudgetExhausted { steps: usize, partial: Box<Term> },

    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("{line}:{col}: unknown symbol `{name}`")]
    UnknownSymbol { line: usize, col: usize, name: String },

    #[error("{line}:{col}: {message}")]
    Semantic {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("{line}:{col}: position {position} is not a position of {term}")]
    PatternPositionInvalid {
        line: usize,
        col: usize,
        position: Position,
        term: String,
    },

    #[error("name `{0}` cannot be written in the termination problem format")]
    UnencodableSymbolName(String),
}
