use thiserror::Error;

use crate::query::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("missing node `{0}`")]
    MissingNode(String),

    #[error("node `{id}` already exists with type `{existing}`, cannot re-add as `{requested}`")]
    TypeConflict {
        id: String,
        existing: String,
        requested: String,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("query field `{path}`: {message}")]
    QueryParse { path: String, message: String },

    #[error("query does not match the graph:\n{}", format_violations(.0))]
    InvalidQuery(Vec<Violation>),

    #[error("invalid reference instance: {0}")]
    InvalidReference(String),

    #[error("node type mismatch: `{left}` is `{left_type}` but `{right}` is `{right_type}`")]
    TypeMismatch {
        left: String,
        left_type: String,
        right: String,
        right_type: String,
    },

    #[error("normalized connectivity undefined: `{0}` has no self paths but connects to the other node")]
    DegenerateBase(String),

    #[error("motif {left} does not fit pattern {right}")]
    PatternMismatch { left: String, right: String },

    #[error("pattern error: {0}")]
    Pattern(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("path count overflow")]
    CountOverflow,

    #[error("node `{0}` is not covered by the computed path counts")]
    NotCovered(String),

    #[error("oracle bound exceeded: {0}")]
    OracleBoundExceeded(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}
