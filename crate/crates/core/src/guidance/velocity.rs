use super::{GuidanceError, GuidingField, Regime, MASS_EPS_REL};
use crate::spacetime::FourVector;

/// Guidance velocity at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity {
    /// `dz/dλ`, normalized so that `ż·ż = ±1` away from critical points.
    pub dz: FourVector,
    /// Kinematic `p·p`.
    pub mass_squared: f64,
    pub regime: Regime,
    /// Orientation `s` with `ż = −s p^♯/√|M²|`.
    pub orientation: f64,
}

pub fn classify(mass_squared: f64, omega0: f64) -> Regime {
    let eps = MASS_EPS_REL * omega0 * omega0;
    if mass_squared > eps {
        Regime::Subluminal
    } else if mass_squared < -eps {
        Regime::Tachyonic
    } else {
        Regime::Critical
    }
}

/// Orientation making `ż⁰ > 0` for covariant momentum `p`.
pub(crate) fn initial_orientation(p: FourVector) -> f64 {
    if p.t > 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Guidance velocity at `z`. Without an orientation hint the sign is chosen
/// so that the time component is positive.
pub fn velocity(field: &impl GuidingField, z: FourVector, orientation: Option<f64>) -> Result<Velocity, GuidanceError> {
    let local = field.local(z)?;
    let p = local.momentum;
    let m2 = p.square();
    let s = orientation.unwrap_or_else(|| initial_orientation(p));
    let regime = classify(m2, field.omega0());
    // Inside the critical band return the limiting null direction with unit time component.
    let scale = if regime == Regime::Critical { p.t.abs().max(f64::MIN_POSITIVE) } else { m2.abs().sqrt() };
    Ok(Velocity { dz: p.dual() * (-s / scale), mass_squared: m2, regime, orientation: s })
}
