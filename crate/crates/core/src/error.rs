use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed algebra document: {0}")]
    Malformed(String),

    #[error("table length mismatch for operation `{symbol}`: expected {expected}, found {found}")]
    TableLength {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("entry {value} at index {index} of operation `{symbol}` is outside the universe of size {size}")]
    EntryOutOfRange {
        symbol: String,
        index: usize,
        value: usize,
        size: usize,
    },

    #[error("duplicate operation symbol `{0}`")]
    DuplicateSymbol(String),

    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),

    #[error("operation `{symbol}` has arity {expected} but was applied to {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("variable x{index} is not bound (only {available} arguments supplied)")]
    UnboundVariable { index: usize, available: usize },

    #[error("element {0} is outside the universe")]
    ElementOutOfRange(usize),

    #[error("universe of size {0} is too large for function closures (limit 256)")]
    UniverseTooLarge(usize),

    #[error("relation is not a congruence: {0}")]
    NotCongruence(String),

    #[error("term is not a Mal'cev term: {0}")]
    NotMalcev(String),

    #[error("series is not central: {0}")]
    NotCentral(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
