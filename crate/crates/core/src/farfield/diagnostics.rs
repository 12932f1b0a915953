use std::f64::consts::PI;

use super::{u_field_point, FarFieldError, FieldQuery, Parts, WorldlineSource};
use crate::numerics::linalg::least_squares;
use crate::spacetime::{minkowski_dot, FourVector};

/// Symmetric-field phase defects below this are treated as exact zeros.
const DEFECT_FLOOR: f64 = 1e-13;

/// Phase structure of the far field on small spheres around one worldline
/// point, sampled in its rest hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct NearSingularityReport {
    pub lambda: f64,
    pub radii: Vec<f64>,
    /// Mean of `|arg u_sym − S + eA·ξ|` over directions, per radius.
    pub symmetric_defect: Vec<f64>,
    /// Log-log slope of `symmetric_defect`. `None` when the defect
    /// vanishes to rounding at every radius, as for uniform motion.
    pub exponent: Option<f64>,
    /// Linear coefficient of the retarded phase offset, `∂_r S` on the past cone.
    pub retarded_slope: f64,
    pub advanced_slope: f64,
    /// `C0` in the fit `r|u_sym| = C0 + C2 r²`.
    pub leading_coefficient: f64,
    /// `g/(4π)` at the sample.
    pub expected_coefficient: f64,
    /// `√|M²|` at the sample.
    pub local_mass: f64,
}

fn wrap(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Unit spacelike directions spanning the hyperplane orthogonal to `u`.
fn hyperplane_directions(u: FourVector) -> Vec<FourVector> {
    let mut basis: Vec<FourVector> = Vec::new();
    for k in 0..3 {
        let mut e = [0.0; 4];
        e[k + 1] = 1.0;
        let mut v = FourVector::from_array(e);
        v = v - u * minkowski_dot(v, u);
        for b in &basis {
            // Spacelike basis vectors have b·b = −1.
            v = v + *b * minkowski_dot(v, *b);
        }
        basis.push(v * (1.0 / (-v.square()).sqrt()));
    }
    let mut dirs = Vec::new();
    for b in &basis {
        dirs.push(*b);
        dirs.push(-*b);
    }
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                let v = basis[0] * sx + basis[1] * sy + basis[2] * sz;
                dirs.push(v * (1.0 / 3f64.sqrt()));
            }
        }
    }
    dirs
}

pub fn near_singularity_diagnostics(
    src: &WorldlineSource,
    lambda: f64,
    radii: &[f64],
) -> Result<NearSingularityReport, FarFieldError> {
    if radii.len() < 3 {
        return Err(FarFieldError::InsufficientRange(format!("need at least 3 radii, got {}", radii.len())));
    }
    let (rmin, rmax) = radii.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    if !(rmax >= 2.0 * rmin) {
        return Err(FarFieldError::InsufficientRange(format!("radii span [{rmin}, {rmax}] is less than a factor 2")));
    }
    if !(rmin > src.rho_floor()) {
        return Err(FarFieldError::InsufficientRange(format!("smallest radius {rmin} is inside ρ_floor")));
    }
    let p = src.traj.at_lambda(lambda).ok_or(FarFieldError::NoRoot { side: "sample" })?;
    let n2 = p.tangent.square();
    if !(n2 > 0.0) {
        return Err(FarFieldError::Invalid("diagnostics need a subluminal sample".into()));
    }
    let u = p.tangent * (1.0 / n2.sqrt());
    let local_mass = src
        .traj
        .samples
        .iter()
        .min_by(|a, b| (a.lambda - lambda).abs().total_cmp(&(b.lambda - lambda).abs()))
        .map_or(src.params.omega0, |s| s.mass_squared.abs().sqrt());
    if !(rmax * local_mass.max(src.params.omega0) < 1.0) {
        return Err(FarFieldError::InsufficientRange(format!("largest radius {rmax} is not small against 1/ω0")));
    }
    let s0 = src.phase_at(&p);
    let ea = src.e_potential(p.z);
    let dirs = hyperplane_directions(u);

    let mut sym = Vec::with_capacity(radii.len());
    let mut ret = Vec::with_capacity(radii.len());
    let mut adv = Vec::with_capacity(radii.len());
    let mut amp = Vec::with_capacity(radii.len());
    for &r in radii {
        let (mut ds, mut dr, mut da, mut a) = (0.0, 0.0, 0.0, 0.0);
        for &eta in &dirs {
            let xi = eta * r;
            let v = u_field_point(src, &FieldQuery::new(p.z + xi, Parts::ALL))?;
            let shift = minkowski_dot(ea, xi);
            let (us, ur, ua) = (v.symmetric.unwrap(), v.retarded.unwrap(), v.advanced.unwrap());
            ds += wrap(us.arg() - s0 + shift).abs();
            dr += wrap(ur.arg() - s0 + shift);
            da += wrap(ua.arg() - s0 + shift);
            a += r * us.norm();
        }
        let n = dirs.len() as f64;
        sym.push(ds / n);
        ret.push(dr / n);
        adv.push(da / n);
        amp.push(a / n);
    }

    let above: Vec<(f64, f64)> =
        radii.iter().zip(&sym).filter(|(_, d)| **d > DEFECT_FLOOR).map(|(r, d)| (r.ln(), d.ln())).collect();
    let exponent = if above.len() >= 3 {
        let xs: Vec<f64> = above.iter().map(|v| v.0).collect();
        let ys: Vec<f64> = above.iter().map(|v| v.1).collect();
        least_squares(&[vec![1.0; xs.len()], xs], &ys).map(|c| c[1])
    } else {
        None
    };
    let lin = |y: &[f64]| -> Result<f64, FarFieldError> {
        let c1: Vec<f64> = radii.to_vec();
        let c2: Vec<f64> = radii.iter().map(|r| r * r).collect();
        least_squares(&[c1, c2], y).map(|c| c[0]).ok_or(FarFieldError::InsufficientRange("degenerate radii".into()))
    };
    let retarded_slope = lin(&ret)?;
    let advanced_slope = lin(&adv)?;
    let c2: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let leading_coefficient = least_squares(&[vec![1.0; radii.len()], c2], &amp)
        .map(|c| c[0])
        .ok_or(FarFieldError::InsufficientRange("degenerate radii".into()))?;
    Ok(NearSingularityReport {
        lambda,
        radii: radii.to_vec(),
        symmetric_defect: sym,
        exponent,
        retarded_slope,
        advanced_slope,
        leading_coefficient,
        expected_coefficient: src.coupling(lambda) / (4.0 * PI),
        local_mass,
    })
}
