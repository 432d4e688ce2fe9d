use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid product space: {0}")]
    InvalidSpace(String),

    #[error("coordinate {coord} has value {value}, must be < {dim}")]
    CoordinateOutOfRange { coord: usize, value: usize, dim: usize },

    #[error("flat index {index} out of range for a space of {size} states")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("coordinate subset is invalid: {0}")]
    InvalidSubset(String),

    #[error("empty coordinate subset (the P^(empty) = 1 convention is handled by callers)")]
    EmptySubset,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("row {row} sums to {sum}, expected 1")]
    RowSum { row: usize, sum: f64 },

    #[error("entry ({row}, {col}) is {value}, expected a finite non-negative number")]
    InvalidEntry { row: usize, col: usize, value: f64 },

    #[error("stationarity violated: |pi P - pi|_inf = {residual:e}")]
    NotStationary { residual: f64 },

    #[error("matrix has no attached stationary distribution")]
    MissingStationary,

    #[error("invalid simplex weights: {0}")]
    InvalidWeights(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("infinite KL divergence for member {member}; subgradient undefined")]
    InfiniteDivergence { member: usize },

    #[error("indeterminate form: infinity minus infinity")]
    Indeterminate,

    #[error("B infinite; family/partition incompatible with uniform step size")]
    InfiniteBound,

    #[error("modular cost is negative ({value:e}); beta is not admissible")]
    NegativeCost { value: f64 },

    #[error("element {coord} cannot be added to block {block}: {reason}")]
    InvalidElement {
        coord: usize,
        block: usize,
        reason: String,
    },

    #[error("temperature too low for direct exponentiation (max |H|/T = {ratio})")]
    TemperatureTooLow { ratio: f64 },

    #[error("state space of {states} states exceeds the cap of {cap}")]
    StateSpaceTooLarge { states: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("malformed chain file {path}: {message}")]
    MalformedFile { path: String, message: String },

    #[error("matrix '{matrix}' row {row} sums to {sum}, expected 1")]
    FileRowSum { matrix: String, row: usize, sum: f64 },

    #[error("matrix '{matrix}' is not stationary for pi: residual {residual:e}")]
    FileStationarity { matrix: String, residual: f64 },
}

impl Error {
    /// Process exit code: 1 for configuration errors, 2 for I/O and file
    /// format errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Io { .. } | MalformedFile { .. } => 2,
            RowSum { .. }
            | InvalidEntry { .. }
            | NotStationary { .. }
            | MissingStationary
            | InvalidDistribution(_)
            | NonFinite(_)
            | InfiniteDivergence { .. }
            | Indeterminate
            | InfiniteBound
            | NegativeCost { .. }
            | TemperatureTooLow { .. }
            | FileRowSum { .. }
            | FileStationarity { .. } => 3,
            InvalidSpace(_)
            | CoordinateOutOfRange { .. }
            | IndexOutOfRange { .. }
            | InvalidSubset(_)
            | EmptySubset
            | InvalidPartition(_)
            | DimensionMismatch(_)
            | InvalidWeights(_)
            | InvalidElement { .. }
            | StateSpaceTooLarge { .. }
            | InvalidParameter(_)
            | Config(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
