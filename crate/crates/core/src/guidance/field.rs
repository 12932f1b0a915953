use super::GuidanceError;
use crate::numerics::interp::stencil;
use crate::spacetime::{polar_decompose, ComplexScalarField, FourVector, RealField, TimeCurvature};
use crate::spacetime::{first_derivative, quantum_potential};
use crate::wave::{ExternalPotential, ModeSum};

/// Local data of the guiding wave at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalWave {
    pub amplitude: f64,
    /// Phase `S`, when the representation provides it.
    pub phase: Option<f64>,
    /// Covariant `p_μ = ∂_μS + eA_μ`.
    pub momentum: FourVector,
    /// `ω0² + Q`.
    pub mass_squared: f64,
}

impl LocalWave {
    /// `p·p`, the kinematic side of the mass relation.
    pub fn kinematic_mass_squared(&self) -> f64 {
        self.momentum.square()
    }
}

/// Anything that can guide a relativistic trajectory.
pub trait GuidingField: Sync {
    fn omega0(&self) -> f64;
    fn potential(&self) -> &ExternalPotential;
    fn local(&self, x: FourVector) -> Result<LocalWave, GuidanceError>;
}

/// Closed-form guiding wave built from exponential modes.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticField {
    pub modes: ModeSum,
    pub omega0: f64,
    pub potential: ExternalPotential,
    /// Absolute amplitude below which the phase is treated as undefined.
    pub amplitude_floor: f64,
}

impl AnalyticField {
    pub fn new(modes: ModeSum, omega0: f64, potential: ExternalPotential) -> Self {
        Self { modes, omega0, potential, amplitude_floor: 1e-12 }
    }
}

impl GuidingField for AnalyticField {
    fn omega0(&self) -> f64 {
        self.omega0
    }

    fn potential(&self) -> &ExternalPotential {
        &self.potential
    }

    fn local(&self, x: FourVector) -> Result<LocalWave, GuidanceError> {
        if !x.is_finite() {
            return Err(GuidanceError::OutsideDomain(x.to_array()));
        }
        let jet = self.modes.jet(x);
        let a = jet.amplitude();
        if !(a > self.amplitude_floor) {
            return Err(GuidanceError::Masked(x.to_array()));
        }
        // A_μ lowered: (V, −𝐀).
        let ea = self.potential.e_four_potential(x).dual();
        Ok(LocalWave {
            amplitude: a,
            phase: Some(jet.psi.arg()),
            momentum: jet.phase_gradient() + ea,
            mass_squared: self.omega0 * self.omega0 + jet.quantum_potential(),
        })
    }
}

struct SliceFields {
    amplitude: Vec<f64>,
    p_t: Vec<f64>,
    p_x: Vec<f64>,
    mass_squared: Vec<f64>,
    valid: Vec<bool>,
}

/// Guiding field recorded from consecutive 1+1D Klein–Gordon slices.
///
/// Grid fields `(a, p_t, p_x, ω0² + Q)` are computed on every interior
/// slice and interpolated cubically in space and linearly in time.
pub struct GriddedField {
    axis: crate::spacetime::Axis,
    t0: f64,
    dt: f64,
    slices: Vec<SliceFields>,
    omega0: f64,
    potential: ExternalPotential,
}

impl GriddedField {
    /// `slices` must be consecutive, uniformly spaced by the grid time step.
    pub fn from_slices(
        slices: &[ComplexScalarField],
        omega0: f64,
        potential: ExternalPotential,
    ) -> Result<Self, GuidanceError> {
        if slices.len() < 3 {
            return Err(GuidanceError::InvalidParams("need at least three slices".into()));
        }
        let grid = slices[0].grid.clone();
        if grid.dims() != 1 {
            return Err(GuidanceError::Dimension("gridded guiding fields are 1+1 dimensional".into()));
        }
        let dt = grid.dt();
        let mut out = Vec::with_capacity(slices.len() - 2);
        for w in slices.windows(3) {
            let (prev, cur, next) = (&w[0], &w[1], &w[2]);
            if prev.grid != grid || cur.grid != grid || next.grid != grid {
                return Err(GuidanceError::Dimension("slices live on different grids".into()));
            }
            if ((next.time_label - prev.time_label) - 2.0 * dt).abs() > 1e-9 * dt.max(1.0) {
                return Err(GuidanceError::InvalidParams("slices are not consecutive time steps".into()));
            }
            let polar = polar_decompose(cur).map_err(crate::wave::WaveError::from)?;
            let amp = |f: &ComplexScalarField| RealField { values: f.values.iter().map(|v| v.norm()).collect(), ..polar.amplitude.clone() };
            let (pa, na) = (amp(prev), amp(next));
            let q = quantum_potential(&polar.amplitude, TimeCurvature::Slices { prev: &pa, next: &na, dt })
                .map_err(crate::wave::WaveError::from)?;
            let t = cur.time_label;
            let n = grid.len();
            let mut f = SliceFields {
                amplitude: polar.amplitude.values.clone(),
                p_t: vec![f64::NAN; n],
                p_x: vec![f64::NAN; n],
                mass_squared: vec![f64::NAN; n],
                valid: q.valid.clone(),
            };
            for i in 0..n {
                if !f.valid[i] {
                    continue;
                }
                let x = grid.point(i);
                let psi = cur.values[i];
                f.p_t[i] = (next.values[i] * prev.values[i].conj()).arg() / (2.0 * dt)
                    + potential.charge * potential.scalar_at(t, x);
                f.p_x[i] = (psi.conj() * first_derivative(&cur.values, &grid, 0, i)).im / psi.norm_sqr()
                    - potential.charge * potential.vector_at(t, x)[0];
                f.mass_squared[i] = omega0 * omega0 + q.field.values[i];
            }
            out.push(f);
        }
        Ok(Self { axis: *grid.axis(0), t0: slices[1].time_label, dt, slices: out, omega0, potential })
    }

    /// Time span covered by the interpolant.
    pub fn time_range(&self) -> (f64, f64) {
        (self.t0, self.t0 + (self.slices.len() - 1) as f64 * self.dt)
    }
}

impl GuidingField for GriddedField {
    fn omega0(&self) -> f64 {
        self.omega0
    }

    fn potential(&self) -> &ExternalPotential {
        &self.potential
    }

    fn local(&self, x: FourVector) -> Result<LocalWave, GuidanceError> {
        let out = || GuidanceError::OutsideDomain(x.to_array());
        let s = (x.t - self.t0) / self.dt;
        if !(s >= 0.0 && s <= (self.slices.len() - 1) as f64) {
            return Err(out());
        }
        let k = (s.floor() as usize).min(self.slices.len() - 2);
        let u = s - k as f64;
        let (idx, w) = stencil(&self.axis, x.x).ok_or_else(out)?;
        let mut acc = [0.0; 4];
        for (slice, wt) in [(&self.slices[k], 1.0 - u), (&self.slices[k + 1], u)] {
            for (&i, &wi) in idx.iter().zip(&w) {
                if !slice.valid[i] {
                    return Err(GuidanceError::Masked(x.to_array()));
                }
                let c = wt * wi;
                acc[0] += c * slice.amplitude[i];
                acc[1] += c * slice.p_t[i];
                acc[2] += c * slice.p_x[i];
                acc[3] += c * slice.mass_squared[i];
            }
        }
        Ok(LocalWave { amplitude: acc[0], phase: None, momentum: FourVector::new(acc[1], acc[2], 0.0, 0.0), mass_squared: acc[3] })
    }
}
