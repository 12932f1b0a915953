use num_complex::Complex64;

use super::{Regime, VectorTerm, WaveError, WaveState};
use crate::spacetime::ComplexScalarField;

/// Leapfrog for `D²Ψ = −ω0²Ψ` in 1+1 dimensions with `D_μ = ∂_μ + ieA_μ`.
///
/// With a static scalar potential and a uniform `Ax` the update is
/// `(1 + iβ)Ψⁿ⁺¹ = 2Ψⁿ − (1 − iβ)Ψⁿ⁻¹ + dt²GΨⁿ` with `β = eV·dt` and the
/// Hermitian operator `G = ∂x² − 2ieAx∂x − e²Ax² + e²V² − ω0²`. The time
/// derivative of gated potentials is neglected between switch times.
/// Uniform scalar terms are removed by an exact gauge rotation, so they only
/// rotate the global phase. Stability requires `dt ≤ 0.5·dx`.
pub struct KleinGordonStepper {
    _private: (),
}

impl KleinGordonStepper {
    pub fn new(state: &WaveState) -> Result<Self, WaveError> {
        if state.regime != Regime::KleinGordon {
            return Err(WaveError::InvalidParams("state is not in the klein_gordon regime".into()));
        }
        let dx = state.psi.grid.axis(0).spacing();
        let dt = state.dt();
        if dt > 0.5 * dx {
            return Err(WaveError::Stability { scheme: "klein_gordon leapfrog", bound: "dt <= 0.5*dx", dt, limit: 0.5 * dx });
        }
        if matches!(state.potential().vector, VectorTerm::MagneticZ { .. }) {
            return Err(WaveError::Unsupported("magnetic field in 1+1 dimensions".into()));
        }
        if state.prev.is_none() {
            return Err(WaveError::MissingPrev);
        }
        Ok(Self { _private: () })
    }

    /// `GΨ` at time `t` for the values `psi` on the state's grid.
    fn apply_g(state: &WaveState, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        let grid = &state.psi.grid;
        let ax = grid.axis(0);
        let n = ax.n;
        let h = ax.spacing();
        let pot = state.potential();
        let e = pot.charge;
        let a = pot.vector_at(t, [0.0; 3])[0];
        let i = Complex64::i();
        let zero = Complex64::new(0.0, 0.0);
        (0..n)
            .map(|j| {
                let x = ax.coord(j);
                let up = if j + 1 < n { psi[j + 1] } else if ax.periodic { psi[0] } else { zero };
                let dn = if j > 0 { psi[j - 1] } else if ax.periodic { psi[n - 1] } else { zero };
                let ev = e * pot.localized_part(t, [x, 0.0, 0.0]);
                let d2 = (up + dn - psi[j] * 2.0) / (h * h);
                let d1 = (up - dn) / (2.0 * h);
                d2 - i * (2.0 * e * a) * d1 + psi[j] * (ev * ev - e * e * a * a - state.omega0 * state.omega0)
            })
            .collect()
    }

    /// `∂t²Ψ` implied by the wave equation given `Ψ` and `∂tΨ`.
    /// Both are taken in the gauge without the uniform terms.
    pub(crate) fn acceleration(state: &WaveState, dpsi_dt: &[Complex64]) -> Vec<Complex64> {
        let t = state.time();
        let g = Self::apply_g(state, &state.psi.values, t);
        let ax = state.psi.grid.axis(0);
        let pot = state.potential();
        let i = Complex64::i();
        g.iter()
            .zip(dpsi_dt)
            .enumerate()
            .map(|(j, (g, d))| g - i * (2.0 * pot.charge * pot.localized_part(t, [ax.coord(j), 0.0, 0.0])) * d)
            .collect()
    }

    /// Phase `e^{−ie·c·dt}` of the uniform terms over one step.
    pub(crate) fn gauge_rotation(state: &WaveState) -> Complex64 {
        let pot = state.potential();
        Complex64::from_polar(1.0, -pot.charge * pot.constant_part(state.time()) * state.dt())
    }

    pub fn step(&mut self, state: &mut WaveState) -> Result<(), WaveError> {
        let prev = state.prev.as_ref().ok_or(WaveError::MissingPrev)?;
        let dt = state.dt();
        let t = state.time();
        let ax = *state.psi.grid.axis(0);
        let pot = state.potential();
        let g = Self::apply_g(state, &state.psi.values, t);
        let i = Complex64::i();
        let rot = Self::gauge_rotation(state);
        let next: Vec<Complex64> = (0..ax.n)
            .map(|j| {
                let beta = pot.charge * pot.localized_part(t, [ax.coord(j), 0.0, 0.0]) * dt;
                let back = prev.values[j] * rot;
                rot * (state.psi.values[j] * 2.0 - back * (1.0 - i * beta) + g[j] * (dt * dt)) / (1.0 + i * beta)
            })
            .collect();
        let next = ComplexScalarField::new(state.psi.grid.clone(), next, t + dt)?;
        state.prev = Some(std::mem::replace(&mut state.psi, next));
        Ok(())
    }
}
