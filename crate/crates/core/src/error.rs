use std::io;

use thiserror::Error;

use crate::graph::GraphError;

/// Syntax errors carry a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("decode budget exceeded: {what} would reach {needed}, budget {budget}")]
    Budget {
        what: &'static str,
        needed: u64,
        budget: u64,
    },
    #[error("circuit still contains a free leaf")]
    FreeLeaf,
    #[error("context enumeration exceeds the cap of {cap} contexts")]
    ContextBudget { cap: usize },
    #[error("rank not saturated at these bounds: {0}")]
    NotSaturated(String),
    #[error("leaf is not one of the system's base structures: {0}")]
    LeafNotInBase(String),
    #[error("missing transition for {op} on classes {classes:?}")]
    MissingTransition { op: String, classes: Vec<u32> },
    #[error("operation {0} is not part of the system")]
    UnknownOp(String),
    #[error("automaton file, line {line}: {message}")]
    AutomatonFile { line: usize, message: String },
    #[error("system file, line {line}: {message}")]
    SystemFile { line: usize, message: String },
    #[error("matrix entry ({row}, {col}): {source}")]
    Entry {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{what}: size {size} exceeds bound {bound}")]
    SizeBound {
        what: &'static str,
        size: usize,
        bound: usize,
    },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
