use super::{GuidanceError, GuidingField, Regime, Trajectory};
use crate::spacetime::FourVector;

/// Residual of the generalized Newton law sampled along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub lambdas: Vec<f64>,
    /// Euclidean norm of the residual four-vector at each interior sample.
    pub residuals: Vec<f64>,
    pub max: f64,
    pub rms: f64,
    /// Interior samples skipped because they touch a critical point.
    pub skipped: usize,
}

fn mass(field: &impl GuidingField, z: FourVector) -> Result<f64, GuidanceError> {
    Ok(field.local(z)?.momentum.square().abs().sqrt())
}

/// Contravariant `∂^μ M` by fourth-order central differences.
fn mass_gradient(field: &impl GuidingField, z: FourVector, delta: f64) -> Result<FourVector, GuidanceError> {
    let mut g = [0.0; 4];
    for (mu, gm) in g.iter_mut().enumerate() {
        let mut e = [0.0; 4];
        e[mu] = delta;
        let e = FourVector::from_array(e);
        let m = |k: f64| mass(field, z + e * k);
        *gm = (8.0 * (m(1.0)? - m(-1.0)?) - (m(2.0)? - m(-2.0)?)) / (12.0 * delta);
    }
    Ok(FourVector::from_array(g).dual())
}

/// Compares `d(M ż^μ)/dλ` from centered differences of the stride samples
/// with `±∂^μM + s·e F^{μν} ż_ν` evaluated from the field, where `M = √|p·p|`
/// and the upper sign holds in the subluminal regime.
pub fn newton_residual(traj: &Trajectory, field: &impl GuidingField) -> Result<NewtonReport, GuidanceError> {
    let smp = &traj.samples;
    let mut lambdas = Vec::new();
    let mut residuals = Vec::new();
    let mut skipped = 0;
    let delta = 1e-3 / field.omega0().max(1.0);
    let e = field.potential().charge;
    for k in 1..smp.len().saturating_sub(1) {
        let (a, b, c) = (&smp[k - 1], &smp[k], &smp[k + 1]);
        if b.regime == Regime::Critical || a.regime != b.regime || c.regime != b.regime {
            skipped += 1;
            continue;
        }
        let h = c.lambda - a.lambda;
        let mz = |s: &super::TrajectorySample| s.dz * s.mass_squared.abs().sqrt();
        let lhs = (mz(c) - mz(a)) * (1.0 / h);
        let sgn = if b.regime == Regime::Tachyonic { -1.0 } else { 1.0 };
        let f = field.potential().field_tensor(b.z);
        let zl = b.dz.dual().to_array();
        let mut lorentz = [0.0; 4];
        for (mu, l) in lorentz.iter_mut().enumerate() {
            *l = traj.orientation * e * (0..4).map(|nu| f[mu][nu] * zl[nu]).sum::<f64>();
        }
        let rhs = mass_gradient(field, b.z, delta)? * sgn + FourVector::from_array(lorentz);
        lambdas.push(b.lambda);
        residuals.push((lhs - rhs).euclidean_norm());
    }
    let max = residuals.iter().copied().fold(0.0, f64::max);
    let rms = if residuals.is_empty() { 0.0 } else { (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt() };
    Ok(NewtonReport { lambdas, residuals, max, rms, skipped })
}
