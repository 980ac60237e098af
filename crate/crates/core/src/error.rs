use thiserror::Error;

/// Errors raised by model assembly, disorder sampling and the spectral estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice dimension {m}^{exponent} = {dimension} exceeds the cap of {cap}")]
    DimensionCap {
        m: usize,
        exponent: usize,
        dimension: u128,
        cap: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("potential field has {actual} values but the lattice has {expected} single-particle sites")]
    FieldLength { expected: usize, actual: usize },

    #[error("realization index {index} out of range for {count} realizations")]
    RealizationIndex { index: usize, count: usize },

    #[error("matrix dimension {dimension} exceeds the dense eigensolver cap of {cap}")]
    DenseCap { dimension: usize, cap: usize },

    #[error("no convergence after {iterations} iterations, last bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("side length {side} is not an integer multiple of the spacing {spacing}")]
    NonIntegerSide { side: f64, spacing: f64 },

    #[error("fit window: {reason}; offending energies {energies:?}")]
    FitWindow { reason: String, energies: Vec<f64> },

    #[error("trial state supports overflow the grid: side {actual} given, at least {required} needed")]
    SupportOverflow { required: usize, actual: usize },

    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("enumeration of {size} index tuples exceeds the cap of {cap}")]
    EnumerationCap { size: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
