use std::f64::consts::PI;

use num_complex::Complex64;

use super::{FarFieldError, WorldlineSource};
use crate::guidance::{find_hyperplane_lambda, TrajectoryPoint};
use crate::spacetime::{boost_x, minkowski_dot, FourVector};

/// Which parts of the field to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parts {
    pub retarded: bool,
    pub advanced: bool,
    pub symmetric: bool,
}

impl Parts {
    pub const ALL: Parts = Parts { retarded: true, advanced: true, symmetric: true };
    pub const RETARDED: Parts = Parts { retarded: true, advanced: false, symmetric: false };
    pub const ADVANCED: Parts = Parts { retarded: false, advanced: true, symmetric: false };
    pub const SYMMETRIC: Parts = Parts { retarded: false, advanced: false, symmetric: true };

    fn any(&self) -> bool {
        self.retarded || self.advanced || self.symmetric
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldQuery {
    pub x: FourVector,
    pub parts: Parts,
}

impl FieldQuery {
    pub fn new(x: FourVector, parts: Parts) -> Self {
        Self { x, parts }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldValue {
    pub retarded: Option<Complex64>,
    pub advanced: Option<Complex64>,
    pub symmetric: Option<Complex64>,
}

impl FieldValue {
    /// `u_in = (u_adv − u_ret)/2`, which equals `−u_out`.
    pub fn incoming(&self) -> Option<Complex64> {
        Some((self.advanced? - self.retarded?) * 0.5)
    }

    pub fn outgoing(&self) -> Option<Complex64> {
        self.incoming().map(|v| -v)
    }
}

struct Roots {
    ret: Option<TrajectoryPoint>,
    adv: Option<TrajectoryPoint>,
}

fn find_roots(src: &WorldlineSource, x: FourVector) -> Roots {
    let traj = &src.traj;
    let roots = traj.roots_split(
        |p| {
            let d = x - p.z;
            minkowski_dot(d, d)
        },
        Some(|p: &TrajectoryPoint| minkowski_dot(x - p.z, p.tangent)),
    );
    let ret = roots.iter().filter(|p| p.z.t < x.t).max_by(|a, b| a.z.t.total_cmp(&b.z.t)).copied();
    let adv = roots.iter().filter(|p| p.z.t > x.t).min_by(|a, b| a.z.t.total_cmp(&b.z.t)).copied();
    if ret.is_none() || adv.is_none() {
        // A point on the worldline touches its own light cone without a sign change.
        if let Some(p) = find_hyperplane_lambda(traj, x).ok().and_then(|l| traj.at_lambda(l)) {
            if (x - p.z).euclidean_norm() <= 1e-12 * x.euclidean_norm().max(1.0) {
                return Roots { ret: Some(p), adv: Some(p) };
            }
        }
    }
    Roots { ret, adv }
}

/// Worldline parameters `(λ_ret, λ_adv)` of the past and future light-cone
/// intersections nearest to `x`.
pub fn lightcone_roots(src: &WorldlineSource, x: FourVector) -> Result<(f64, f64), FarFieldError> {
    let r = find_roots(src, x);
    let ret = r.ret.ok_or(FarFieldError::NoRoot { side: "retarded" })?;
    let adv = r.adv.ok_or(FarFieldError::NoRoot { side: "advanced" })?;
    Ok((ret.lambda, adv.lambda))
}

/// `g e^{iS}/(4πρ) · e^{−ieA(z)·(x−z)}` at one root.
fn contribution(src: &WorldlineSource, x: FourVector, p: &TrajectoryPoint, side: &'static str) -> Result<Complex64, FarFieldError> {
    let n2 = p.tangent.square();
    if n2 == 0.0 || !n2.is_finite() {
        return Err(FarFieldError::NullTangent { side });
    }
    let zdot = p.tangent * (1.0 / n2.abs().sqrt());
    let d = x - p.z;
    let rho = minkowski_dot(d, zdot).abs();
    let floor = src.rho_floor();
    if !(rho > floor) {
        return Err(FarFieldError::TooClose { rho, floor });
    }
    let g = src.coupling(p.lambda);
    let phase = src.phase_at(p) - minkowski_dot(src.e_potential(p.z), d);
    Ok(Complex64::from_polar(g / (4.0 * PI * rho), phase))
}

pub fn u_field_point(src: &WorldlineSource, q: &FieldQuery) -> Result<FieldValue, FarFieldError> {
    if !q.parts.any() {
        return Err(FarFieldError::NoParts);
    }
    let roots = find_roots(src, q.x);
    let need_ret = q.parts.retarded || q.parts.symmetric;
    let need_adv = q.parts.advanced || q.parts.symmetric;
    let ret = if need_ret {
        let p = roots.ret.ok_or(FarFieldError::NoRoot { side: "retarded" })?;
        Some(contribution(src, q.x, &p, "retarded")?)
    } else {
        None
    };
    let adv = if need_adv {
        let p = roots.adv.ok_or(FarFieldError::NoRoot { side: "advanced" })?;
        Some(contribution(src, q.x, &p, "advanced")?)
    } else {
        None
    };
    Ok(FieldValue {
        retarded: ret.filter(|_| q.parts.retarded),
        advanced: adv.filter(|_| q.parts.advanced),
        symmetric: if q.parts.symmetric { Some((ret.unwrap() + adv.unwrap()) * 0.5) } else { None },
    })
}

/// Rest monopole `(g0/4π) e^{−iω0t} cos(ω0R)/R`.
pub fn monopole_reference(omega0: f64, g0: f64, t: f64, r: f64) -> Result<Complex64, FarFieldError> {
    if !(r > 0.0) {
        return Err(FarFieldError::NonPositiveRadius(r));
    }
    Ok(Complex64::from_polar(1.0, -omega0 * t) * (g0 / (4.0 * PI) * (omega0 * r).cos() / r))
}

/// Monopole moving with velocity `v` along +x through the origin, at the
/// lab point `x`. Evaluated as the rest monopole at the rest-frame
/// coordinates of `x`.
pub fn boosted_monopole_reference(omega0: f64, g0: f64, v: f64, x: FourVector) -> Result<Complex64, FarFieldError> {
    let rest = boost_x(x, v)?;
    let r = (rest.x * rest.x + rest.y * rest.y + rest.z * rest.z).sqrt();
    monopole_reference(omega0, g0, rest.t, r)
}

/// Sum of the symmetric fields of several sources.
pub fn n_soliton_field(sources: &[WorldlineSource], x: FourVector) -> Result<Complex64, FarFieldError> {
    let q = FieldQuery::new(x, Parts::SYMMETRIC);
    let mut acc = Complex64::new(0.0, 0.0);
    for (index, s) in sources.iter().enumerate() {
        let v = u_field_point(s, &q).map_err(|e| FarFieldError::Source { index, source: Box::new(e) })?;
        acc += v.symmetric.unwrap();
    }
    Ok(acc)
}
