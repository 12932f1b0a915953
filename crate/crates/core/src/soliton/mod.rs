//! Lane–Emden solitons riding on guidance trajectories.
//!
//! The near field is the exact fifth-power Lane–Emden profile, dilated by
//! the collective coordinate α. Frequency-dependent radial profiles come
//! from a shooting solver. `α(λ)` and `B(λ)` follow from the variable mass
//! sampled along a trajectory.

mod collective;
mod profile;
mod radial;

pub use collective::{
    alpha_evolution, b_evolution, compression_residual, decorate, phase_harmony_phase, AlphaNormalization, BSample,
    SolitonState,
};
pub use profile::{lane_emden_profile, lane_emden_residual, tachyonic_profile, Exponent, ResidualMode, TachyonicValue};
pub use radial::{interpolated_profile, solve_radial_profile, write_radial_csv, RadialOptions, RadialProfile};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolitonError {
    #[error("invalid soliton parameters: {0}")]
    InvalidParams(String),
    #[error("point lies outside the near-field radius ({r} ≥ {limit})")]
    OutsideNearField { r: f64, limit: f64 },
    #[error("shooting did not converge: {0}")]
    Shooting(String),
}

/// Coupling, core radius and rest frequency of a soliton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParams {
    pub g0: f64,
    pub l0: f64,
    pub omega0: f64,
}

impl SolitonParams {
    /// Validates positivity and the small-core condition `l0 ≤ 0.01/ω0`.
    pub fn new(g0: f64, l0: f64, omega0: f64) -> Result<Self, SolitonError> {
        let p = Self::unconstrained(g0, l0, omega0)?;
        if l0 * omega0 > 0.01 * (1.0 + 1e-12) {
            return Err(SolitonError::InvalidParams(format!("core radius l0 = {l0} exceeds 0.01/ω0 = {}", 0.01 / omega0)));
        }
        Ok(p)
    }

    /// Positivity checks only.
    pub fn unconstrained(g0: f64, l0: f64, omega0: f64) -> Result<Self, SolitonError> {
        if !(g0 > 0.0 && l0 > 0.0 && omega0 > 0.0) || !(g0.is_finite() && l0.is_finite() && omega0.is_finite()) {
            return Err(SolitonError::InvalidParams(format!("need g0, l0, ω0 > 0, got {g0}, {l0}, {omega0}")));
        }
        Ok(Self { g0, l0, omega0 })
    }

    /// `g0/4π`, the scalar charge of the unit-α monopole.
    pub fn charge(&self) -> f64 {
        self.g0 / (4.0 * std::f64::consts::PI)
    }

    /// Coefficient `K = 3 l0²/(g0/4π)⁴` of the fifth-power term.
    pub fn nonlinearity(&self) -> f64 {
        3.0 * self.l0 * self.l0 / self.charge().powi(4)
    }
}
