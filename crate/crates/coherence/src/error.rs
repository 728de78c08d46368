use thiserror::Error;

/// Errors surfaced by state, channel, and checker constructors.
///
/// Indices in messages are 1-based to match the conventional labeling of
/// basis states |1⟩, …, |d⟩.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |m - m†| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary: max |u·u† - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPsd { eigenvalue: f64 },

    #[error("trace is {trace} (expected 1)")]
    NotUnitTrace { trace: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("dimension {dim} exceeds limit {max}")]
    DimTooLarge { dim: usize, max: usize },

    #[error("map is not a bijection of 1..={dim}")]
    NotPermutation { dim: usize },

    #[error(
        "Kraus operator {index} is not a generalized permutation: {axis} {line} has {count} nonzero entries"
    )]
    NotGeneralizedPermutation {
        index: usize,
        /// "row" or "column".
        axis: &'static str,
        /// 1-based row/column label.
        line: usize,
        count: usize,
    },

    #[error("Kraus family is not complete: max |ΣK†K - I| = {deviation:e}")]
    NotComplete { deviation: f64 },

    #[error("Kraus operator {index} is identically zero")]
    ZeroKrausOperator { index: usize },

    #[error("parameter {name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("sampling exhausted after {attempts} rejections")]
    SamplingExhausted { attempts: usize },

    #[error("state is not an X state: {reason}")]
    NotXState { reason: String },

    #[error("vector is not a probability vector: {reason}")]
    NotProbabilityVector { reason: String },

    #[error("hypothesis not met: {reason}")]
    HypothesisNotMet { reason: String },

    #[error("invalid file format: {0}")]
    Format(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
