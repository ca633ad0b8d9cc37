use thiserror::Error;

/// Failures raised by the exact algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("jet truncation shortfall: need order {needed}, have {available}")]
    TruncationShortfall { needed: usize, available: usize },
    #[error("jet has valuation {valuation}, cannot divide by rho^{shift}")]
    NotDivisible { valuation: usize, shift: usize },
    #[error("jet with vanishing constant term is not invertible")]
    NotInvertible,
    #[error("denominator depends on `{0}` at the expansion point")]
    SingularExpansion(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{0}")]
    Unsupported(String),
}
