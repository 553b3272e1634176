//! Error type shared by the numeric modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("mode index {index} out of range -{max_index}..={max_index}")]
    ModeIndexOutOfRange { index: i32, max_index: i32 },

    #[error("invalid mode set: {0}")]
    InvalidModeSet(String),

    #[error("invalid Fock basis: {0}")]
    InvalidBasis(String),

    #[error("occupation vector {0:?} does not fit the basis")]
    InvalidOccupation(Vec<u32>),

    #[error("operators live on different bases: {0}")]
    BasisMismatch(String),

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid evolution parameters: {0}")]
    InvalidParameters(String),

    #[error(
        "physicality breach at step {step} (t = {time}): {what} = {value:e} beyond {threshold:e}"
    )]
    PhysicalityBreach {
        step: usize,
        time: f64,
        what: &'static str,
        value: f64,
        threshold: f64,
    },

    #[error("decay fit needs at least {needed} usable records, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("pair space dimension {dim} exceeds the configured bound {bound}")]
    MemoryGuard { dim: usize, bound: usize },

    #[error("{0}")]
    Numerical(String),
}
