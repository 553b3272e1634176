//! Error type for the symbolic engine.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("unbound name `{0}`")]
    UnboundName(String),

    #[error("integral variable `{0}` shadows an enclosing binder")]
    ShadowedBinder(String),

    #[error("division by a zero scalar expression")]
    DivisionByZero,

    #[error("operator factor with un-integrated momentum `{0}`")]
    UnintegratedMomentum(String),

    #[error("boundary terms cannot be discarded: {0}")]
    BoundaryTerms(String),

    #[error("expression contains un-eliminated derivative factors")]
    DerivativeFactor,

    #[error("cannot mix plain operator terms and tensor-pair terms: {0}")]
    MixedKinds(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("lattice evaluation failed: {0}")]
    Lattice(String),
}
