//! Verification suites, factor tables and tensor operations behind the
//! `ambient` binary. Everything here is deterministic given the seed.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

use ambient_gjms::GeometryError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(#[source] GeometryError),
    #[error("truncation shortfall: rerun with order at least {needed} (--trunc {trunc}); had {available}")]
    Truncation { needed: usize, available: usize, trunc: usize },
    #[error(transparent)]
    Geometry(GeometryError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Truncation { .. } => 3,
            CliError::Geometry(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> CliError {
        if let Some((needed, available)) = truncation(&e) {
            return CliError::Truncation { needed, available, trunc: needed.saturating_sub(1) };
        }
        match e {
            GeometryError::Range(_)
            | GeometryError::DimensionTooSmall { .. }
            | GeometryError::NotTraceFree { .. }
            | GeometryError::NotTT { .. }
            | GeometryError::Malformed(_) => CliError::Input(e),
            other => CliError::Geometry(other),
        }
    }
}

/// `(needed, available)` for jet-order shortfalls from either layer.
pub fn truncation(e: &GeometryError) -> Option<(usize, usize)> {
    match e {
        GeometryError::Truncation { needed, available } => Some((*needed, *available)),
        GeometryError::Algebra(a) => GeometryError::truncation_of(a),
        _ => None,
    }
}
