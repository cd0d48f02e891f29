use thiserror::Error;

/// Everything that can go wrong across the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("structures have different signatures")]
    SignatureMismatch,
    #[error("duplicate relation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("relation symbol `{0}` has arity 0")]
    ZeroArity(String),
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` expects {expected} arguments, got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("element {element} out of range for domain of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("structures must have a nonempty domain")]
    EmptyDomain,
    #[error("invalid sentence: {0}")]
    InvalidSentence(String),
    #[error("the sentence is ⊥")]
    Bottom,
    #[error("constants are not allowed here")]
    ConstantsNotAllowed,
    #[error("expected a primitive positive (all-existential) sentence")]
    NotPrimitivePositive,
    #[error("`{0}` is not a universal variable of the sentence")]
    NotUniversal(String),
    #[error("{found} surviving universal variables, at most {max} allowed")]
    TooManySurvivors { found: usize, max: usize },
    #[error("structure is not a core")]
    NotACore,
    #[error("relation symbol `{0}` already present")]
    NameClash(String),
    #[error("invalid partitioned structure: {0}")]
    InvalidPartition(String),
    #[error("operation arity {0} is below 3")]
    ArityTooSmall(usize),
    #[error("operation table does not match the structure (domain {expected}, table {found})")]
    TableMismatch { expected: usize, found: usize },
    #[error("size {size} exceeds the configured bound {bound}")]
    SizeBound { size: usize, bound: usize },
    #[error("node budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
