use thiserror::Error;

/// Errors raised by the analysis, simulation and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid type assignment: {0}")]
    InvalidTypeAssignment(String),

    #[error("invalid fitness model: {0}")]
    InvalidFitness(String),

    #[error("invalid initial graph: {0}")]
    InvalidInitialGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// More than one sign change inside a single grid cell.
    #[error("unresolved roots in [{lo}, {hi}]; increase grid_n")]
    UnresolvedRoot { lo: f64, hi: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("exact enumeration exceeded {limit} states")]
    StateSpaceTooLarge { limit: usize },

    #[error("trajectory has no record at step {0}")]
    MissingRecord(u64),

    #[error("wrong model: {0}")]
    WrongModel(String),

    #[error("invariant violated at step {step}: {detail}")]
    InvariantViolation { step: u64, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
