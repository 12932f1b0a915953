use std::io::Write;

use super::{SolitonError, SolitonParams};
use crate::numerics::linalg::least_squares;
use crate::numerics::ode::{integrate, Tolerances};
use crate::numerics::roots::brent;
use crate::output::RunMeta;

/// Near/far interpolation `(√α g0/4π) cos(ωr)/√(α²r² + l0²)`.
pub fn interpolated_profile(p: &SolitonParams, alpha: f64, omega: f64, r: f64) -> f64 {
    alpha.sqrt() * p.charge() * (omega * r).cos() / (alpha * alpha * r * r + p.l0 * p.l0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOptions {
    /// Number of output radii on `[0, r_max]`.
    pub n_out: usize,
    /// Points used in the far-field fit on `[r_max/2, r_max]`.
    pub n_fit: usize,
    pub tol: Tolerances,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self {
            n_out: 2001,
            n_fit: 400,
            tol: Tolerances { rtol: 1e-11, atol: 1e-14, h_init: 1e-6, h_min: 1e-16, ..Default::default() },
        }
    }
}

/// Solution of `F'' + 2F'/r + K F⁵ + ω²F = 0` with `F'(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub alpha: f64,
    pub omega: f64,
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    /// Central value selected by shooting.
    pub f0: f64,
    /// Fitted far-field amplitude of `rF`.
    pub far_amplitude: f64,
    /// Fitted far-field phase: `rF ≈ A cos(ωr + δ)`, or the `δ = 0` limit when ω = 0.
    pub far_phase: f64,
}

struct Shot {
    r: Vec<f64>,
    f: Vec<f64>,
    amplitude: f64,
    phase: f64,
}

/// Integrates outward from the regular series at the origin and samples `F`
/// at the requested radii (sorted, all ≥ 0).
fn shoot(p: &SolitonParams, omega: f64, f0: f64, radii: &[f64], tol: &Tolerances) -> Result<Vec<f64>, SolitonError> {
    let k = p.nonlinearity();
    let g = |f: f64| k * f.powi(5) + omega * omega * f;
    let dg = |f: f64| 5.0 * k * f.powi(4) + omega * omega;
    let f2 = -g(f0) / 6.0;
    let f4 = dg(f0) * g(f0) / 120.0;
    // Start where the r⁶ term of the series is far below rounding.
    let core = p.l0 * (p.charge() / (f0 * p.l0)).powi(2);
    let r0 = 1e-4 * core.min(0.1 / omega.max(1e-300));
    let series = |r: f64| (f0 + f2 * r * r + f4 * r.powi(4), 2.0 * f2 * r + 4.0 * f4 * r.powi(3));
    let mut out = vec![f64::NAN; radii.len()];
    let mut next = 0;
    while next < radii.len() && radii[next] <= r0 {
        out[next] = series(radii[next]).0;
        next += 1;
    }
    let r_end = *radii.last().unwrap_or(&r0);
    if next == radii.len() {
        return Ok(out);
    }
    let (a0, b0) = series(r0);
    let rhs = |r: f64, y: &[f64; 2]| Ok::<_, ()>([y[1], -2.0 * y[1] / r - k * y[0].powi(5) - omega * omega * y[0]]);
    let mut tol = *tol;
    tol.h_init = tol.h_init.min(0.1 * r0);
    integrate(rhs, r0, [a0, b0], r_end, &tol, |d| {
        while next < radii.len() && radii[next] <= d.s1() {
            out[next] = d.eval_at(radii[next])[0];
            next += 1;
        }
        true
    })
    .map_err(|e| SolitonError::Shooting(format!("radial integration failed: {e:?}")))?;
    Ok(out)
}

fn far_fit(omega: f64, r: &[f64], f: &[f64]) -> Option<(f64, f64)> {
    let rf: Vec<f64> = r.iter().zip(f).map(|(r, f)| r * f).collect();
    if omega == 0.0 {
        let c = least_squares(&[vec![1.0; r.len()], r.iter().map(|r| r.powi(-2)).collect()], &rf)?;
        return Some((c[0], 0.0));
    }
    let cols = [r.iter().map(|r| (omega * r).cos()).collect(), r.iter().map(|r| (omega * r).sin()).collect()];
    let c = least_squares(&cols, &rf)?;
    // A cos ωr + B sin ωr = R cos(ωr + δ) with R cos δ = A, −R sin δ = B.
    Some(((c[0] * c[0] + c[1] * c[1]).sqrt(), (-c[1]).atan2(c[0])))
}

fn shot(p: &SolitonParams, omega: f64, f0: f64, r_max: f64, opts: &RadialOptions, out_grid: bool) -> Result<Shot, SolitonError> {
    let fit_r: Vec<f64> = (0..opts.n_fit).map(|i| r_max * (0.5 + 0.5 * i as f64 / (opts.n_fit - 1) as f64)).collect();
    let mut radii: Vec<f64> = if out_grid {
        (0..opts.n_out).map(|i| r_max * i as f64 / (opts.n_out - 1) as f64).collect()
    } else {
        Vec::new()
    };
    let n_grid = radii.len();
    radii.extend(&fit_r);
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| radii[i]).collect();
    let vals = shoot(p, omega, f0, &sorted, &opts.tol)?;
    let mut f = vec![0.0; radii.len()];
    for (j, &i) in order.iter().enumerate() {
        f[i] = vals[j];
    }
    let (amplitude, phase) = far_fit(omega, &fit_r, &f[n_grid..])
        .ok_or_else(|| SolitonError::Shooting("far-field fit is degenerate".into()))?;
    Ok(Shot { r: radii[..n_grid].to_vec(), f: f[..n_grid].to_vec(), amplitude, phase })
}

/// Shoots on the central value `F(0)` so the far field has the amplitude
/// `g0/(4π√α)` of the dilated monopole, then samples `F` on `[0, r_max]`.
///
/// `r_max` should cover a few far-field wavelengths when ω > 0.
pub fn solve_radial_profile(
    p: &SolitonParams,
    alpha: f64,
    omega: f64,
    r_max: f64,
    opts: &RadialOptions,
) -> Result<RadialProfile, SolitonError> {
    if !(alpha > 0.0) || !(omega >= 0.0) || !(r_max > 0.0) {
        return Err(SolitonError::InvalidParams("need α > 0, ω ≥ 0, r_max > 0".into()));
    }
    if omega * p.l0 > 0.1 {
        return Err(SolitonError::InvalidParams(format!("ω·l0 = {} exceeds 0.1", omega * p.l0)));
    }
    let target = p.charge() / alpha.sqrt();
    let guess = alpha.sqrt() * p.charge() / p.l0;
    let miss = |f0: f64| -> f64 {
        match shot(p, omega, f0, r_max, opts, false) {
            Ok(s) if s.amplitude > 0.0 => (s.amplitude / target).ln(),
            _ => f64::NAN,
        }
    };
    let (mut lo, mut hi) = (0.5 * guess, 2.0 * guess);
    let (mut mlo, mut mhi) = (miss(lo), miss(hi));
    let mut tries = 0;
    while !(mlo * mhi < 0.0) {
        tries += 1;
        if tries > 20 || !(mlo.is_finite() && mhi.is_finite()) {
            return Err(SolitonError::Shooting(format!(
                "no bracket for F(0): miss({lo}) = {mlo}, miss({hi}) = {mhi} after {tries} expansions"
            )));
        }
        lo *= 0.5;
        hi *= 2.0;
        mlo = miss(lo);
        mhi = miss(hi);
    }
    let f0 = brent(miss, lo, hi, 1e-14 * guess).map_err(|e| SolitonError::Shooting(e.to_string()))?;
    let s = shot(p, omega, f0, r_max, opts, true)?;
    Ok(RadialProfile { alpha, omega, r: s.r, f: s.f, f0, far_amplitude: s.amplitude, far_phase: s.phase })
}

/// Two-column `r,F` CSV with a metadata header line.
pub fn write_radial_csv(w: &mut impl Write, prof: &RadialProfile, meta: &RunMeta) -> std::io::Result<()> {
    writeln!(w, "{}", meta.header_line())?;
    writeln!(w, "r,F")?;
    for (r, f) in prof.r.iter().zip(&prof.f) {
        writeln!(w, "{r},{f}")?;
    }
    Ok(())
}
