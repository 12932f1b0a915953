use num_complex::Complex64;

use super::{AnalyticTruth, ExternalPotential, Mode, ModeSum, Regime, WaveError, WaveState};
use crate::spacetime::{ComplexScalarField, FourVector, GridSpec};

/// Closed-form Klein–Gordon waves on a 1D grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceKind {
    /// `e^{i(kx − ωt)}`, `ω = √(ω0² + k²)`.
    Plane { k: f64 },
    /// `cos(kx) e^{−iωt}`, `ω = √(ω0² + k²)`.
    Standing { k: f64, omega: Option<f64> },
    /// `e^{κx} e^{−iωt}`, `ω = √(ω0² − κ²)`. With `test_mode` the field is
    /// the static `e^{κx}` and κ may exceed ω0; it then probes the tachyonic
    /// branch of `ω0² + Q` without solving the wave equation.
    Evanescent { kappa: f64, omega: Option<f64>, test_mode: bool },
    /// `e^{−iω0γ(t − vx)}`: the phase of a monopole moving with velocity `v`.
    BoostedMonopolePhase { v: f64 },
}

fn check_omega(given: Option<f64>, expected: f64, what: &str) -> Result<f64, WaveError> {
    match given {
        Some(w) if (w - expected).abs() > 1e-12 * expected.abs().max(1.0) => {
            Err(WaveError::Dispersion(format!("{what}: omega = {w} but the dispersion relation gives {expected}")))
        }
        _ => Ok(expected),
    }
}

/// Samples a reference wave on `grid` at time `t0`, with the previous slice
/// at `t0 − dt` and analytic-truth metadata attached.
pub fn make_reference_wave(kind: ReferenceKind, omega0: f64, grid: GridSpec, t0: f64) -> Result<WaveState, WaveError> {
    if grid.dims() != 1 {
        return Err(WaveError::Unsupported("reference waves are one dimensional".into()));
    }
    let w0sq = omega0 * omega0;
    let (modes, omega, mass_squared, test_mode) = match kind {
        ReferenceKind::Plane { k } => {
            let w = (w0sq + k * k).sqrt();
            (vec![Mode::plane(1.0, [k, 0.0, 0.0], w)], w, w0sq, false)
        }
        ReferenceKind::Standing { k, omega } => {
            let w = check_omega(omega, (w0sq + k * k).sqrt(), "standing wave")?;
            (vec![Mode::plane(0.5, [k, 0.0, 0.0], w), Mode::plane(0.5, [-k, 0.0, 0.0], w)], w, w * w, false)
        }
        ReferenceKind::Evanescent { kappa, omega, test_mode } => {
            let m2 = w0sq - kappa * kappa;
            let w = if test_mode {
                if omega.is_some_and(|w| w != 0.0) {
                    return Err(WaveError::Dispersion("evanescent test mode is static (omega = 0)".into()));
                }
                0.0
            } else {
                if !(kappa < omega0) {
                    return Err(WaveError::Dispersion(format!(
                        "evanescent wave needs kappa < omega0 ({kappa} >= {omega0}) unless test_mode is set"
                    )));
                }
                check_omega(omega, m2.sqrt(), "evanescent wave")?
            };
            let mode = Mode {
                amplitude: Complex64::new(1.0, 0.0),
                k: [Complex64::new(0.0, -kappa), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
                omega: Complex64::new(w, 0.0),
            };
            (vec![mode], w, m2, test_mode)
        }
        ReferenceKind::BoostedMonopolePhase { v } => {
            if !(v.abs() < 1.0) {
                return Err(WaveError::InvalidParams(format!("boost velocity {v} must satisfy |v| < 1")));
            }
            let g = 1.0 / (1.0 - v * v).sqrt();
            (vec![Mode::plane(1.0, [omega0 * g * v, 0.0, 0.0], omega0 * g)], omega0 * g, w0sq, false)
        }
    };
    let modes = ModeSum::new(modes);
    let sample = |t: f64| {
        ComplexScalarField::from_fn(grid.clone(), t, |p| modes.eval(FourVector::new(t, p[0], 0.0, 0.0)))
    };
    let mut state = WaveState::new(sample(t0), omega0, vec![ExternalPotential::free()], Regime::KleinGordon)?;
    state.prev = Some(sample(t0 - grid.dt()));
    state.truth = Some(AnalyticTruth { modes, omega, mass_squared, static_amplitude: true, test_mode });
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::line(0.0, 10.0, 101, false, 0.01).unwrap()
    }

    #[test]
    fn stored_frequencies() {
        let s = make_reference_wave(ReferenceKind::Standing { k: 1.0, omega: None }, 1.0, grid(), 0.0).unwrap();
        assert!((s.truth.unwrap().omega - 2f64.sqrt()).abs() < 1e-15);
        let e = make_reference_wave(ReferenceKind::Evanescent { kappa: 0.5, omega: None, test_mode: false }, 1.0, grid(), 0.0)
            .unwrap();
        assert!((e.truth.unwrap().omega - 0.75f64.sqrt()).abs() < 1e-15);
        let p = make_reference_wave(ReferenceKind::Plane { k: 0.0 }, 1.0, grid(), 2.0).unwrap();
        let expect = Complex64::from_polar(1.0, -2.0);
        assert!(p.psi.values.iter().all(|v| (v - expect).norm() < 1e-14));
    }

    #[test]
    fn inconsistent_dispersion_is_rejected() {
        let r = make_reference_wave(ReferenceKind::Standing { k: 1.0, omega: Some(1.0) }, 1.0, grid(), 0.0);
        assert!(matches!(r, Err(WaveError::Dispersion(_))));
        let r = make_reference_wave(ReferenceKind::Evanescent { kappa: 1.2, omega: None, test_mode: false }, 1.0, grid(), 0.0);
        assert!(matches!(r, Err(WaveError::Dispersion(_))));
        assert!(make_reference_wave(ReferenceKind::Evanescent { kappa: 1.2, omega: None, test_mode: true }, 1.0, grid(), 0.0).is_ok());
    }
}
