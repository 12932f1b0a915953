use num_complex::Complex64;

use super::{evolve, Regime, WaveError, WaveState};
use crate::numerics::interp::stencil;
use crate::spacetime::{
    first_derivative, polar_decompose, quantum_potential, second_derivative, ComplexScalarField, FourVector,
    MaskedField, RealField, TimeCurvature, AMPLITUDE_FLOOR_REL,
};

/// Slices at `t − dt` and `t + dt`, from the analytic truth when present.
fn neighbour_slices(state: &WaveState) -> Result<(ComplexScalarField, ComplexScalarField), WaveError> {
    let dt = state.dt();
    let t = state.time();
    if let Some(truth) = &state.truth {
        let grid = state.psi.grid.clone();
        let at = |tt: f64| {
            ComplexScalarField::from_fn(grid.clone(), tt, |p| truth.modes.eval(FourVector::new(tt, p[0], p[1], p[2])))
        };
        return Ok((at(t - dt), at(t + dt)));
    }
    let prev = state.prev.clone().ok_or(WaveError::MissingPrev)?;
    let mut probe = state.clone();
    probe.sponge = None;
    let next = evolve(probe, 1)?.psi;
    Ok((prev, next))
}

/// Grid fields entering the variable mass.
#[derive(Debug, Clone, PartialEq)]
pub struct MassField {
    /// `ω0² + Q`, masked at nodes.
    pub mass_squared: MaskedField,
    /// Covariant `p_t = ∂tS + eV`.
    pub p_t: Vec<f64>,
    /// Covariant `p_x = ∂xS − eAx`.
    pub p_x: Vec<f64>,
}

impl MassField {
    /// Kinematic mass `p·p` at node `i`.
    pub fn kinematic(&self, i: usize) -> f64 {
        self.p_t[i] * self.p_t[i] - self.p_x[i] * self.p_x[i]
    }
}

/// Variable mass and momentum on every node of a Klein–Gordon state.
pub fn mass_field(state: &WaveState) -> Result<MassField, WaveError> {
    if state.regime != Regime::KleinGordon {
        return Err(WaveError::Unsupported("the relativistic mass needs the klein_gordon regime".into()));
    }
    let (prev, next) = neighbour_slices(state)?;
    let dt = state.dt();
    let polar = polar_decompose(&state.psi)?;
    let q = if state.truth.as_ref().is_some_and(|t| t.static_amplitude) {
        quantum_potential(&polar.amplitude, TimeCurvature::Static)?
    } else {
        let pa = RealField { values: prev.values.iter().map(|v| v.norm()).collect(), ..polar.amplitude.clone() };
        let na = RealField { values: next.values.iter().map(|v| v.norm()).collect(), ..polar.amplitude.clone() };
        quantum_potential(&polar.amplitude, TimeCurvature::Slices { prev: &pa, next: &na, dt })?
    };
    let grid = &state.psi.grid;
    let pot = state.potential();
    let t = state.time();
    let w0sq = state.omega0 * state.omega0;
    let mut m2 = q;
    for (i, v) in m2.field.values.iter_mut().enumerate() {
        if m2.valid[i] {
            *v += w0sq;
        }
    }
    let psi = &state.psi.values;
    let mut p_t = vec![f64::NAN; grid.len()];
    let mut p_x = vec![f64::NAN; grid.len()];
    for i in 0..grid.len() {
        if !m2.valid[i] {
            continue;
        }
        let n = psi[i].norm_sqr();
        let x = grid.point(i);
        // Phase difference of the neighbouring slices; exact for global phase rotations.
        let ds_t = (next.values[i] * prev.values[i].conj()).arg() / (2.0 * dt);
        let dpsi_x = first_derivative(psi, grid, 0, i);
        p_t[i] = ds_t + pot.charge * pot.scalar_at(t, x);
        p_x[i] = (psi[i].conj() * dpsi_x).im / n - pot.charge * pot.vector_at(t, x)[0];
    }
    Ok(MassField { mass_squared: m2, p_t, p_x })
}

/// Variable mass interpolated at one point of the current slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassSample {
    /// `ω0² + Q`.
    pub mass_squared: f64,
    /// Covariant `∂_μS + eA_μ`.
    pub momentum: FourVector,
    /// `(∂S + eA)²`, the other side of the mass relation.
    pub kinematic: f64,
}

/// `ω0² + Q_Ψ(x)` together with the four-gradient `∂S + eA` at `x`.
pub fn variable_mass_squared(state: &WaveState, x: FourVector) -> Result<MassSample, WaveError> {
    if (x.t - state.time()).abs() > 0.5 * state.dt() {
        return Err(WaveError::OutsideGrid(x.to_array()));
    }
    let mf = mass_field(state)?;
    let ax = state.psi.grid.axis(0);
    let (idx, w) = stencil(ax, x.x).ok_or(WaveError::OutsideGrid(x.to_array()))?;
    if idx.iter().any(|&i| !mf.mass_squared.valid[i]) {
        return Err(WaveError::Masked(x.to_array()));
    }
    let mix = |v: &[f64]| idx.iter().zip(w).map(|(&i, w)| w * v[i]).sum::<f64>();
    let m2 = mix(&mf.mass_squared.field.values);
    let pt = mix(&mf.p_t);
    let px = mix(&mf.p_x);
    Ok(MassSample {
        mass_squared: m2,
        momentum: FourVector::new(pt, px, 0.0, 0.0),
        kinematic: pt * pt - px * px,
    })
}

/// Pointwise residual of the current conservation law.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub residual: MaskedField,
    /// `(Σ r² ΔV)^{1/2}` over valid nodes.
    pub l2: f64,
}

impl ResidualField {
    pub fn count_above(&self, threshold: f64) -> usize {
        self.residual.field.values.iter().zip(&self.residual.valid).filter(|(r, v)| **v && r.abs() > threshold).count()
    }

    pub fn max_abs(&self) -> f64 {
        self.residual.field.values.iter().zip(&self.residual.valid).filter(|(_, v)| **v).map(|(r, _)| r.abs()).fold(0.0, f64::max)
    }
}

/// Four-divergence of the guiding current.
///
/// Klein–Gordon: `Im(Ψ̄ D²Ψ)`, equal to `∂_μ[a²(∂^μS + eA^μ)]`.
/// Schrödinger: `∂t|ψ|² + Σ_j ∂_j Im(ψ̄∂_jψ)/m`.
/// Both use centered differences over the slices at `t ± dt`.
pub fn continuity_residual(state: &WaveState) -> Result<ResidualField, WaveError> {
    let (prev, next) = neighbour_slices(state)?;
    let grid = state.psi.grid.clone();
    let dt = state.dt();
    let t = state.time();
    let psi = &state.psi.values;
    let floor = AMPLITUDE_FLOOR_REL * state.psi.max_abs();
    let mut values = vec![f64::NAN; grid.len()];
    let mut valid = vec![false; grid.len()];
    match state.regime {
        Regime::KleinGordon => {
            let pot = state.potential();
            let e = pot.charge;
            let i_ = Complex64::i();
            for j in 0..grid.len() {
                if !(psi[j].norm() > floor) {
                    continue;
                }
                let x = grid.point(j);
                let v = pot.scalar_at(t, x);
                let vt = (pot.scalar_at(t + dt, x) - pot.scalar_at(t - dt, x)) / (2.0 * dt);
                let a = pot.vector_at(t, x)[0];
                let ptt = (next.values[j] - psi[j] * 2.0 + prev.values[j]) / (dt * dt);
                let pt = (next.values[j] - prev.values[j]) / (2.0 * dt);
                let pxx = second_derivative(psi, &grid, 0, j);
                let px = first_derivative(psi, &grid, 0, j);
                let dtt = ptt + i_ * (2.0 * e * v) * pt + i_ * (e * vt) * psi[j] - psi[j] * (e * e * v * v);
                let dxx = pxx - i_ * (2.0 * e * a) * px - psi[j] * (e * e * a * a);
                values[j] = (psi[j].conj() * (dtt - dxx)).im;
                valid[j] = true;
            }
        }
        Regime::Schrodinger => {
            let m = state.omega0;
            let currents: Vec<Vec<f64>> = (0..grid.dims())
                .map(|k| (0..grid.len()).map(|j| (psi[j].conj() * first_derivative(psi, &grid, k, j)).im / m).collect())
                .collect();
            for j in 0..grid.len() {
                if !(psi[j].norm() > floor) {
                    continue;
                }
                let drho = (next.values[j].norm_sqr() - prev.values[j].norm_sqr()) / (2.0 * dt);
                let div: f64 = (0..grid.dims()).map(|k| first_derivative(&currents[k], &grid, k, j)).sum();
                values[j] = drho + div;
                valid[j] = true;
            }
        }
    }
    let dv = grid.cell_volume();
    let l2 = values.iter().zip(&valid).filter(|(_, v)| **v).map(|(r, _)| r * r * dv).sum::<f64>().sqrt();
    Ok(ResidualField { residual: MaskedField { field: RealField { grid, values, time_label: t }, valid }, l2 })
}

/// Discrete conserved charge of the leapfrog between `prev` and `psi`:
/// `Σ Im[Ψ̄ⁿ(1 + ieV dt)Ψⁿ⁺¹ e^{iec·dt}]·dx/dt` with `Ψⁿ = prev`, `V` the
/// localized potential and `c` its uniform part.
pub fn klein_gordon_charge(state: &WaveState) -> Result<f64, WaveError> {
    let prev = state.prev.as_ref().ok_or(WaveError::MissingPrev)?;
    let grid = &state.psi.grid;
    let dt = state.dt();
    let pot = state.potential();
    let t0 = prev.time_label;
    let i_ = Complex64::i();
    let rot = Complex64::from_polar(1.0, pot.charge * pot.constant_part(t0) * dt);
    let sum: f64 = (0..grid.len())
        .map(|j| {
            let beta = pot.charge * pot.localized_part(t0, grid.point(j)) * dt;
            (prev.values[j].conj() * (1.0 + i_ * beta) * state.psi.values[j] * rot).im
        })
        .sum();
    Ok(sum * grid.cell_volume() / dt)
}
