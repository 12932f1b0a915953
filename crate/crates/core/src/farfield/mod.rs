//! Retarded and advanced far fields of moving soliton singularities.
//!
//! A worldline with its action `S(λ)` and coupling `g(λ) = g0/√α(λ)` acts
//! as a point source for `□u = −ω0²u`-type radiation. Far from the core the
//! field is the Liénard–Wiechert form evaluated on the past and future light
//! cones of the query point. Closer than [`WorldlineSource::rho_floor`] the
//! formula is refused and the soliton near field applies instead.

mod diagnostics;
mod field;
mod map;
mod source;

pub use diagnostics::{near_singularity_diagnostics, NearSingularityReport};
pub use field::{
    boosted_monopole_reference, lightcone_roots, monopole_reference, n_soliton_field, u_field_point, FieldQuery,
    FieldValue, Parts,
};
pub use map::{field_map, write_field_map, FieldMap, MapWindow};
pub use source::{WorldlineSource, MAX_NODE_PHASE_STEP};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FarFieldError {
    #[error("no {side} light-cone root inside the sampled worldline")]
    NoRoot { side: &'static str },
    #[error("ρ = {rho} is inside the core region (ρ_floor = {floor}); use the soliton near field there")]
    TooClose { rho: f64, floor: f64 },
    #[error("worldline tangent is null at the {side} root")]
    NullTangent { side: &'static str },
    #[error("node spacing too coarse: phase step {step} at λ = {lambda} exceeds {limit}")]
    StrideTooCoarse { step: f64, lambda: f64, limit: f64 },
    #[error("worldline has fewer than two nodes")]
    EmptyWorldline,
    #[error("coupling is not positive and finite at λ = {lambda}")]
    BadCoupling { lambda: f64 },
    #[error("monopole radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("no field part requested")]
    NoParts,
    #[error("insufficient radius range for a fit: {0}")]
    InsufficientRange(String),
    #[error("source {index}: {source}")]
    Source { index: usize, source: Box<FarFieldError> },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl From<crate::spacetime::SpacetimeError> for FarFieldError {
    fn from(e: crate::spacetime::SpacetimeError) -> Self {
        FarFieldError::Invalid(e.to_string())
    }
}
