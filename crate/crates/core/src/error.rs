use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid tensor shape: order {order}, dim {dim} (need order >= 2, dim >= 1)")]
    InvalidShape { order: usize, dim: usize },

    #[error("index tuple {index:?} has length {actual}, expected order {expected}")]
    IndexLength {
        index: Vec<usize>,
        expected: usize,
        actual: usize,
    },

    #[error("index tuple {index:?} out of range for dim {dim}")]
    IndexOutOfRange { index: Vec<usize>, dim: usize },

    #[error("non-finite value {value} at index {index:?}")]
    NonFinite { index: Vec<usize>, value: f64 },

    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("shape mismatch: ({left_order}, {left_dim}) vs ({right_order}, {right_dim})")]
    ShapeMismatch {
        left_order: usize,
        left_dim: usize,
        right_order: usize,
        right_dim: usize,
    },

    #[error("tensor is not Metzler: off-diagonal entry {index:?} = {value} is negative")]
    NotMetzler { index: Vec<usize>, value: f64 },

    #[error("tensor is not nonnegative: entry {index:?} = {value}")]
    NotNonnegative { index: Vec<usize>, value: f64 },

    #[error("tensor is not irreducible (mode-sum pattern is not strongly connected)")]
    NotIrreducible,

    #[error("exact irreducibility check limited to dim <= {cap}, got {dim}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("monomial has degree {actual}, expected {expected}")]
    DegreeMismatch { expected: usize, actual: usize },

    #[error("operation requires a supersymmetric tensor")]
    SupersymmetryRequired,

    #[error("power iteration did not converge in {iterations} iterations; bracket [{lower}, {upper}]")]
    MaxIterExceeded { iterations: usize, lower: f64, upper: f64 },

    #[error("fixed-point solver did not converge in {iterations} iterations; residual {residual:e}")]
    SolverMaxIter {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("not a nonsingular M-tensor: {reason}")]
    NotMTensor { reason: String },

    #[error("right-hand side must be entrywise positive (component {index} = {value})")]
    NotPositiveRhs { index: usize, value: f64 },

    #[error("rate estimate needs order k > 2, got {order}")]
    OrderTooLow { order: usize },

    #[error("rate estimate undefined at Perron value {value} (needs nonzero)")]
    ZeroPerronValue { value: f64 },

    #[error("mask cannot reach the margin: closed-loop value at alpha = 1 is {closed_loop_value}")]
    InfeasibleMask { closed_loop_value: f64 },

    #[error("invalid mask entry {index:?}: {reason}")]
    InvalidMask { index: Vec<usize>, reason: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid SIS parameters: {0}")]
    InvalidSisParameters(String),

    #[error("initial state outside the invariant region: {0}")]
    InvalidInitialState(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of an iterative method on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::MaxIterExceeded { .. } | Error::SolverMaxIter { .. } | Error::InfeasibleMask { .. }
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
