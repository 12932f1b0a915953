use super::{SolitonError, SolitonParams};
use crate::guidance::{classify, Regime, TrajectorySample};
use crate::spacetime::{minkowski_dot, FourVector};
use crate::wave::ExternalPotential;

/// Asymptotic reference for `α`: `α = α∞ √(|M|/M∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaNormalization {
    pub alpha_inf: f64,
    pub mass_inf: f64,
}

impl AlphaNormalization {
    /// `α∞ = 1` with `M∞ = ω0`.
    pub fn rest(omega0: f64) -> Self {
        Self { alpha_inf: 1.0, mass_inf: omega0 }
    }
}

/// `α(λ)` from `M²` samples; vanishes at critical points.
pub fn alpha_evolution(mass_squared: &[f64], norm: AlphaNormalization) -> Vec<f64> {
    mass_squared.iter().map(|m2| norm.alpha_inf * (m2.abs().sqrt() / norm.mass_inf).sqrt()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BSample {
    pub lambda: f64,
    pub b: f64,
    /// The difference stencil touches a critical sample or a sign change of `M²`.
    pub flagged: bool,
}

/// Three-point first derivative on a possibly nonuniform stencil at `x[k]`.
fn d1(x: &[f64], y: &[f64], k: usize) -> f64 {
    let n = x.len();
    let (i0, i1, i2) = if k == 0 {
        (0, 1, 2)
    } else if k == n - 1 {
        (n - 3, n - 2, n - 1)
    } else {
        (k - 1, k, k + 1)
    };
    let (a, b, c) = (x[i0], x[i1], x[i2]);
    let t = x[k];
    // Derivative of the quadratic through the three points.
    y[i0] * (2.0 * t - b - c) / ((a - b) * (a - c))
        + y[i1] * (2.0 * t - a - c) / ((b - a) * (b - c))
        + y[i2] * (2.0 * t - a - b) / ((c - a) * (c - b))
}

/// `B = ½ dM/dλ` with `M = √|M²|` by second-order differences. In
/// tachyonic segments `λ` is the spacelike arc length, so this is
/// `½ dΩ/dθ` there.
pub fn b_evolution(lambdas: &[f64], mass_squared: &[f64], omega0: f64) -> Vec<BSample> {
    let n = lambdas.len();
    assert_eq!(n, mass_squared.len());
    if n < 3 {
        return lambdas.iter().map(|&lambda| BSample { lambda, b: f64::NAN, flagged: true }).collect();
    }
    let m: Vec<f64> = mass_squared.iter().map(|v| v.abs().sqrt()).collect();
    let reg: Vec<Regime> = mass_squared.iter().map(|&v| classify(v, omega0)).collect();
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(1).min(n - 3);
            let st = &reg[lo..lo + 3];
            let flagged = st.contains(&Regime::Critical) || st.iter().any(|r| *r != st[0]);
            BSample { lambda: lambdas[k], b: 0.5 * d1(lambdas, &m, k), flagged }
        })
        .collect()
}

/// `3B/M − d/dλ ln(f²M)` with `f² ∝ α`, at interior samples.
pub fn compression_residual(lambdas: &[f64], alpha: &[f64], b: &[BSample], mass_squared: &[f64]) -> Vec<f64> {
    let n = lambdas.len();
    let ln: Vec<f64> = (0..n).map(|k| (alpha[k] * mass_squared[k].abs().sqrt()).ln()).collect();
    (1..n.saturating_sub(1))
        .map(|k| 3.0 * b[k].b / mass_squared[k].abs().sqrt() - d1(lambdas, &ln, k))
        .collect()
}

/// Soliton collective coordinates attached to one trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonState {
    pub params: SolitonParams,
    pub lambda: f64,
    pub alpha: f64,
    pub b: f64,
    pub flagged: bool,
}

pub fn decorate(samples: &[TrajectorySample], params: SolitonParams, norm: AlphaNormalization) -> Vec<SolitonState> {
    let m2: Vec<f64> = samples.iter().map(|s| s.mass_squared).collect();
    let lambdas: Vec<f64> = samples.iter().map(|s| s.lambda).collect();
    let alpha = alpha_evolution(&m2, norm);
    let b = b_evolution(&lambdas, &m2, params.omega0);
    (0..samples.len())
        .map(|k| SolitonState { params, lambda: lambdas[k], alpha: alpha[k], b: b[k].b, flagged: b[k].flagged })
        .collect()
}

/// Local phase `S(z) − eA(z)·ξ + Bξ²/2` near the core, where `ξ` is
/// `x − z` projected onto the hyperplane orthogonal to `ż`.
pub fn phase_harmony_phase(
    sample: &TrajectorySample,
    b: f64,
    potential: &ExternalPotential,
    x: FourVector,
    omega0: f64,
) -> Result<f64, SolitonError> {
    let zd = sample.dz;
    let xi = x - sample.z;
    let n = minkowski_dot(zd, zd);
    let xi = if n != 0.0 { xi - zd * (minkowski_dot(xi, zd) / n) } else { xi };
    let xi2 = minkowski_dot(xi, xi);
    let r = xi2.abs().sqrt();
    let limit = 0.1 / omega0;
    if !(r < limit) {
        return Err(SolitonError::OutsideNearField { r, limit });
    }
    let ea = potential.e_four_potential(sample.z);
    Ok(sample.action - minkowski_dot(ea, xi) + 0.5 * b * xi2)
}
