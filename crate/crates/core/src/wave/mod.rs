//! Guiding-wave evolution and analytic reference waves.
//!
//! Two regimes are supported. The Schrödinger regime evolves a
//! nonrelativistic wave on a one- or two-axis configuration grid, one axis
//! per particle, with a Crank–Nicolson scheme (factorized per axis in 2D).
//! The Klein–Gordon regime evolves `D²Ψ = −ω0²Ψ` in 1+1 dimensions with an
//! explicit leapfrog.

mod diagnostics;
mod klein_gordon;
mod modes;
mod potential;
mod reference;
mod schrodinger;
mod state;

pub use diagnostics::{
    continuity_residual, klein_gordon_charge, mass_field, variable_mass_squared, MassField, MassSample,
    ResidualField,
};
pub use klein_gordon::KleinGordonStepper;
pub use modes::{Jet, Mode, ModeSum};
pub use potential::{ExternalPotential, ScalarTerm, TimeGate, VectorTerm};
pub use reference::{make_reference_wave, ReferenceKind};
pub use schrodinger::SchrodingerStepper;
pub use state::{evolve, AnalyticTruth, Evolver, Regime, Sponge, WaveState};

use thiserror::Error;

use crate::spacetime::SpacetimeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("{scheme} stability bound violated: requires {bound} (dt = {dt}, limit = {limit})")]
    Stability { scheme: &'static str, bound: &'static str, dt: f64, limit: f64 },
    #[error("non-finite value after step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },
    #[error("inconsistent dispersion: {0}")]
    Dispersion(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("klein_gordon regime needs the previous time slice")]
    MissingPrev,
    #[error("invalid wave parameters: {0}")]
    InvalidParams(String),
    #[error("point {0:?} lies outside the grid or slice")]
    OutsideGrid([f64; 4]),
    #[error("point {0:?} is in a masked (node) region")]
    Masked([f64; 4]),
    #[error(transparent)]
    Spacetime(#[from] SpacetimeError),
}
