//! Ambient-metric constructions for GJMS operators on trace-free symmetric
//! 2-tensors: chart geometry of the base, the normal-form ambient space,
//! the sl(2) machinery, and the conformally Einstein model.

pub mod ambient_geometry;
pub mod chart_geometry;
pub mod einstein_model;
pub mod error;
pub mod gjms_core;
pub mod tensor;

pub use error::{GeometryError, Result};
pub use tensor::{Symmetry, TensorDocument, TensorField};
