use super::FarFieldError;
use crate::guidance::{Trajectory, TrajectoryKind, TrajectoryPoint};
use crate::soliton::{alpha_evolution, AlphaNormalization, SolitonParams};
use crate::spacetime::FourVector;
use crate::wave::ExternalPotential;

/// Largest action increment allowed between consecutive worldline nodes.
/// Above it the Hermite interpolation of `S` no longer resolves the phase.
pub const MAX_NODE_PHASE_STEP: f64 = 1.0;

/// A soliton singularity as a far-field source.
#[derive(Debug, Clone)]
pub struct WorldlineSource {
    pub traj: Trajectory,
    pub params: SolitonParams,
    pub potential: ExternalPotential,
    g_lambda: Vec<f64>,
    g_values: Vec<f64>,
    /// Rest-mass phase rate added back for lab-time worldlines: the source
    /// phase is `action − rate·t`.
    rest_phase_rate: f64,
}

impl WorldlineSource {
    /// Coupling `g0/√α` with `α` from the sampled `M²`.
    pub fn from_trajectory(
        traj: Trajectory,
        params: SolitonParams,
        potential: ExternalPotential,
        norm: AlphaNormalization,
    ) -> Result<Self, FarFieldError> {
        let m2: Vec<f64> = traj.samples.iter().map(|s| s.mass_squared).collect();
        let alpha = alpha_evolution(&m2, norm);
        let mut g_lambda = Vec::with_capacity(m2.len());
        let mut g_values = Vec::with_capacity(m2.len());
        for (s, a) in traj.samples.iter().zip(alpha) {
            let g = params.g0 / a.sqrt();
            // Critical samples have α = 0; interpolate across them.
            if g.is_finite() && g > 0.0 {
                g_lambda.push(s.lambda);
                g_values.push(g);
            }
        }
        if g_values.is_empty() {
            return Err(FarFieldError::BadCoupling { lambda: traj.samples.first().map_or(f64::NAN, |s| s.lambda) });
        }
        Self::build(traj, params, potential, g_lambda, g_values, 0.0)
    }

    /// Constant coupling `g0` (α ≡ 1).
    pub fn with_constant_coupling(
        traj: Trajectory,
        params: SolitonParams,
        potential: ExternalPotential,
    ) -> Result<Self, FarFieldError> {
        Self::build(traj, params, potential, vec![0.0], vec![params.g0], 0.0)
    }

    /// Lab-time worldline from many-body transport. The recorded action is
    /// the Schrödinger phase, so the rest phase `−ω0 t` is restored here.
    pub fn from_nonrelativistic(
        traj: Trajectory,
        params: SolitonParams,
        potential: ExternalPotential,
    ) -> Result<Self, FarFieldError> {
        if traj.kind != TrajectoryKind::Nonrelativistic {
            return Err(FarFieldError::Invalid("expected a lab-time trajectory".into()));
        }
        let rate = params.omega0;
        Self::build(traj, params, potential, vec![0.0], vec![params.g0], rate)
    }

    fn build(
        traj: Trajectory,
        params: SolitonParams,
        potential: ExternalPotential,
        g_lambda: Vec<f64>,
        g_values: Vec<f64>,
        rest_phase_rate: f64,
    ) -> Result<Self, FarFieldError> {
        let nodes = traj.nodes();
        if nodes.len() < 2 {
            return Err(FarFieldError::EmptyWorldline);
        }
        for w in nodes.windows(2) {
            if !(w[1].y[4] > w[0].y[4]) {
                return Err(FarFieldError::Invalid(format!("λ does not increase at node λ = {}", w[0].y[4])));
            }
            let step = (w[1].y[5] - w[0].y[5]).abs();
            if !(step <= MAX_NODE_PHASE_STEP) {
                return Err(FarFieldError::StrideTooCoarse { step, lambda: w[0].y[4], limit: MAX_NODE_PHASE_STEP });
            }
        }
        Ok(Self { traj, params, potential, g_lambda, g_values, rest_phase_rate })
    }

    /// Below this distance from the worldline the far-field form is refused.
    pub fn rho_floor(&self) -> f64 {
        10.0 * self.params.l0
    }

    /// `S` at an interpolated worldline point.
    pub fn phase_at(&self, p: &TrajectoryPoint) -> f64 {
        p.action - self.rest_phase_rate * p.z.t
    }

    /// `g(λ)`, linear between samples and held constant outside them.
    pub fn coupling(&self, lambda: f64) -> f64 {
        let (l, g) = (&self.g_lambda, &self.g_values);
        let j = l.partition_point(|&v| v < lambda);
        if j == 0 {
            return g[0];
        }
        if j == l.len() {
            return g[l.len() - 1];
        }
        let u = (lambda - l[j - 1]) / (l[j] - l[j - 1]);
        g[j - 1] + u * (g[j] - g[j - 1])
    }

    /// `e·A^μ` at a worldline point.
    pub fn e_potential(&self, z: FourVector) -> FourVector {
        self.potential.e_four_potential(z)
    }

    /// The same source with its worldline reflected through `t = 0`.
    pub fn time_reflected(&self) -> Self {
        let mut out = self.clone();
        out.traj = self.traj.time_reflected();
        let n = self.g_lambda.len();
        out.g_lambda = (0..n).rev().map(|k| -self.g_lambda[k]).collect();
        out.g_values = (0..n).rev().map(|k| self.g_values[k]).collect();
        out.rest_phase_rate = -self.rest_phase_rate;
        out
    }
}
