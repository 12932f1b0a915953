//! Minkowski geometry, uniform grids and sampled fields.

mod container;
mod field;
mod fourvector;
mod grid;
mod polar;
mod qpot;

pub use container::{read_container, write_complex, write_real, Container, ContainerValues};
pub use field::{ComplexScalarField, RealField};
pub use fourvector::{boost_x, minkowski_dot, FourVector};
pub use grid::{Axis, GridSpec};
pub(crate) use polar::unwrap_near;
pub use polar::{polar_decompose, PolarField};
pub use qpot::{first_derivative, laplacian, quantum_potential, second_derivative, MaskedField, Stencil, TimeCurvature};

use thiserror::Error;

/// Relative amplitude below which phase and quantum potential are undefined.
pub const AMPLITUDE_FLOOR_REL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpacetimeError {
    #[error("boost velocity |v| = {0} must be below 1")]
    Superluminal(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field has {got} samples but grid needs {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("no phase defined: field vanishes everywhere")]
    NoPhase,
    #[error("grids of the supplied slices differ")]
    GridMismatch,
    #[error("container: {0}")]
    Container(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for SpacetimeError {
    fn from(e: std::io::Error) -> Self {
        SpacetimeError::Io(e.to_string())
    }
}
