use ambient_exact::AlgebraError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("valence mismatch: {0}")]
    Valence(String),
    #[error("metric is not invertible")]
    NonInvertible,
    #[error("dimension {dim} too small: {what} needs n >= 3")]
    DimensionTooSmall { dim: usize, what: &'static str },
    #[error("input is not trace-free; trace = {residual}")]
    NotTraceFree { residual: String },
    #[error("input is not TT: {residual}")]
    NotTT { residual: String },
    #[error("truncation shortfall: need order {needed}, have {available}")]
    Truncation { needed: usize, available: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no non-zero solution at the requested degree; best achievable order {max_order}")]
    NoSolution { max_order: usize },
    #[error("out of range: {0}")]
    Range(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

impl GeometryError {
    /// Normalises jet shortfalls coming from the algebra layer.
    pub fn truncation_of(e: &AlgebraError) -> Option<(usize, usize)> {
        match e {
            AlgebraError::TruncationShortfall { needed, available } => Some((*needed, *available)),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;
