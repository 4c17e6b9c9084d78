use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ground-set size {0} out of range (1..={max})", max = crate::subsets::MAX_K)]
    GroundSize(usize),
    #[error("element {element} outside 1..={k}")]
    ElementOutOfRange { element: usize, k: usize },
    #[error("mask {bits:#b} has bits beyond ground-set size {k}")]
    MaskOutOfRange { bits: u32, k: usize },
    #[error("ground-set size mismatch: expected {expected}, got {got}")]
    GroundMismatch { expected: usize, got: usize },
    #[error("operation requires a nonempty family")]
    EmptyFamily,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{slice} does not sum to 1 (sum = {sum})")]
    NotNormalized { slice: String, sum: f64 },
    #[error("{slice} has entry {value} outside [0, 1]")]
    BadProbability { slice: String, value: f64 },
    #[error("state space of {0} atoms exceeds the 10^7 limit")]
    StateSpaceTooLarge(u128),
    #[error("variable sets overlap on {0}")]
    OverlappingVariables(String),
    #[error("variable {0} does not exist in this distribution")]
    UnknownVariable(String),
    #[error("negative rate {value} for transmitter {index}")]
    NegativeRate { index: usize, value: f64 },
    #[error("row has a negative rate coefficient: {0}")]
    NegativeCoefficient(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("variable index {index} outside 0..{dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
