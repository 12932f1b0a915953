//! The acceptance suite: one pass/fail line per headline property.
//!
//! Shared by `dslab verify` and the `acceptance` test target. Each check
//! returns its measured numbers so a failure explains itself. Thresholds
//! and problem sizes are fixed here; `Mode::Full` repeats the stochastic
//! checks over extra seeds.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use crate::farfield::{monopole_reference, near_singularity_diagnostics, u_field_point, FieldQuery, Parts, WorldlineSource};
use crate::guidance::{
    integrate_trajectory, newton_residual, sample_born, transport, AnalyticField, EnsembleSpec, Regime, TrajectoryOptions,
    TransportOptions,
};
use crate::numerics::rng::{streams, SeedStream};
use crate::numerics::stats::{ks_one_sample, GridCdf};
use crate::scenarios::{
    record_cauchy_surface, run_beam_splitter, run_epr, tune_barrier, BeamSplitterParams, BeamSplitterRun, CauchyParams,
    EprParams, Settings,
};
use crate::soliton::{
    alpha_evolution, interpolated_profile, lane_emden_profile, lane_emden_residual, solve_radial_profile,
    AlphaNormalization, Exponent, RadialOptions, ResidualMode, SolitonParams,
};
use crate::spacetime::{Axis, ComplexScalarField, FourVector, GridSpec};
use crate::wave::{ExternalPotential, Mode as WaveMode, ModeSum, Regime as WaveRegime, WaveState};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fast,
    Full,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<28} {} [{:.1} s]", self.name, self.detail, self.elapsed.as_secs_f64())
    }
}

type Check = fn(Mode) -> Result<(bool, String), String>;

/// The criteria in reporting order.
pub const CRITERIA: [(&str, Check); 11] = [
    ("lane_emden_exactness", lane_emden_exactness),
    ("dilation_invariance", dilation_invariance),
    ("radial_bvp_interpolation", radial_bvp_interpolation),
    ("monopole_closure", monopole_closure),
    ("phase_slope_discontinuity", phase_slope_discontinuity),
    ("newton_consistency", newton_consistency),
    ("equivariance", equivariance),
    ("beam_splitter_half", beam_splitter_half),
    ("tachyonic_crossing", tachyonic_crossing),
    ("epr_audit", epr_audit),
    ("cauchy_signature", cauchy_signature),
];

/// Runs one criterion by name.
pub fn run_one(name: &str, mode: Mode) -> Option<Outcome> {
    let (name, check) = CRITERIA.iter().find(|(n, _)| *n == name)?;
    let t = Instant::now();
    let (passed, detail) = match check(mode) {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(Outcome { name, passed, detail, elapsed: t.elapsed() })
}

/// Runs every criterion, calling `report` as each finishes.
pub fn run_all(mode: Mode, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .map(|(name, _)| {
            let o = run_one(name, mode).expect("listed");
            report(&o);
            o
        })
        .collect()
}

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn unit_soliton() -> SolitonParams {
    SolitonParams::new(4.0 * PI, 1.0, 0.01).expect("valid")
}

fn lane_emden_exactness(_: Mode) -> Result<(bool, String), String> {
    let t = Instant::now();
    let p = unit_soliton();
    let radii: Vec<f64> = (1..=2000).map(|i| 1e-3 * 10f64.powf(6.0 * i as f64 / 2000.0)).collect();
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 2.0, 7.0] {
        let res = lane_emden_residual(&p, alpha, &radii, ResidualMode::Analytic, Exponent::LANE_EMDEN);
        worst = res.iter().fold(worst, |m, r| m.max(r.abs()));
    }
    let secs = t.elapsed().as_secs_f64();
    Ok((worst < 1e-12 && secs < 1.0, format!("max residual {worst:.2e} (< 1e-12), {secs:.3} s (< 1 s)")))
}

fn dilation_invariance(_: Mode) -> Result<(bool, String), String> {
    let p = unit_soliton();
    let mut rng = SeedStream::new(1, streams::ACCEPTANCE);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let alpha = 10f64.powf(rng.range(-2.0, 2.0));
        let r = rng.range(0.0, 1e3);
        let a = lane_emden_profile(&p, alpha, r);
        let b = alpha.sqrt() * lane_emden_profile(&p, 1.0, alpha * r);
        worst = worst.max(((a - b) / a).abs());
    }
    Ok((worst <= 1e-14, format!("max relative deviation {worst:.2e} over 1000 (α, r) (≤ 1e-14)")))
}

fn radial_bvp_interpolation(_: Mode) -> Result<(bool, String), String> {
    let t = Instant::now();
    let omega_l0 = 0.01;
    let p = SolitonParams::new(4.0 * PI, 0.01, omega_l0 / 0.01).map_err(err)?;
    let omega = omega_l0 / p.l0;
    let opts = RadialOptions { n_out: 8001, ..Default::default() };
    let prof = solve_radial_profile(&p, 1.0, omega, 12.0 * PI / omega, &opts).map_err(err)?;
    let half_band = 0.025 * PI / omega;
    let mut worst = 0.0f64;
    for (r, f) in prof.r.iter().zip(&prof.f) {
        if *r > 3.0 / omega {
            break;
        }
        if (0..3).any(|j| (r - (j as f64 + 0.5) * PI / omega).abs() < half_band) {
            continue;
        }
        let g = interpolated_profile(&p, 1.0, omega, *r);
        worst = worst.max(((f - g) / g).abs());
    }
    let secs = t.elapsed().as_secs_f64();
    Ok((
        worst < 0.01 && secs < 30.0,
        format!("max relative deviation {worst:.3} (< 0.01) outside zero bands, far phase {:.3e}, {secs:.1} s", prof.far_phase),
    ))
}

fn plane(k: f64, omega0: f64) -> AnalyticField {
    let w = (omega0 * omega0 + k * k).sqrt();
    AnalyticField::new(ModeSum::new(vec![WaveMode::plane(1.0, [k, 0.0, 0.0], w)]), omega0, ExternalPotential::free())
}

fn stride(h: f64) -> TrajectoryOptions {
    TrajectoryOptions { stride: h, ..Default::default() }
}

fn static_source() -> Result<WorldlineSource, String> {
    let tr = integrate_trajectory(&plane(0.0, 1.0), FourVector::new(-20.0, 0.0, 0.0, 0.0), (-20.0, 20.0), &stride(0.05))
        .map_err(err)?;
    let p = SolitonParams::new(1.0, 1e-3, 1.0).map_err(err)?;
    WorldlineSource::with_constant_coupling(tr, p, ExternalPotential::free()).map_err(err)
}

fn monopole_closure(_: Mode) -> Result<(bool, String), String> {
    let src = static_source()?;
    let mut rng = SeedStream::new(2, streams::ACCEPTANCE);
    let (mut sym, mut ret, mut adv) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let t = rng.range(-5.0, 5.0);
        let r = rng.range(0.1, 10.0);
        let c = rng.range(-1.0, 1.0);
        let phi = rng.range(0.0, 2.0 * PI);
        let s = (1.0 - c * c).sqrt();
        let x = FourVector::new(t, r * s * phi.cos(), r * s * phi.sin(), r * c);
        let v = u_field_point(&src, &FieldQuery::new(x, Parts::ALL)).map_err(err)?;
        let want = monopole_reference(1.0, 1.0, t, r).map_err(err)?;
        sym = sym.max((v.symmetric.unwrap_or_default() - want).norm());
        let amp = 1.0 / (4.0 * PI * r);
        ret = ret.max((v.retarded.unwrap_or_default() - Complex64::from_polar(amp, -(t - r))).norm());
        adv = adv.max((v.advanced.unwrap_or_default() - Complex64::from_polar(amp, -(t + r))).norm());
    }
    let ok = sym < 1e-10 && ret < 1e-10 && adv < 1e-10;
    Ok((ok, format!("max |Δu| sym {sym:.1e}, ret {ret:.1e}, adv {adv:.1e} at 100 points (< 1e-10)")))
}

fn phase_slope_discontinuity(_: Mode) -> Result<(bool, String), String> {
    let src = static_source()?;
    let rep = near_singularity_diagnostics(&src, 0.0, &[0.02, 0.03, 0.05, 0.07, 0.1]).map_err(err)?;
    let (rs, as_) = (rep.retarded_slope, rep.advanced_slope);
    let slopes_ok = (rs - 1.0).abs() < 0.01 && (as_ + 1.0).abs() < 0.01;
    // Uniform motion has no defect at all, so the exponent is measured on
    // an accelerated worldline: the centre of a Klein-Gordon packet.
    let f = AnalyticField::new(ModeSum::klein_gordon_packet(1.0, 0.5, 0.25, 0.0, 81), 1.0, ExternalPotential::free());
    let tr = integrate_trajectory(&f, FourVector::new(-6.0, 0.0, 0.0, 0.0), (-6.0, 6.0), &stride(0.01)).map_err(err)?;
    let p = SolitonParams::new(1.0, 1e-3, 1.0).map_err(err)?;
    let packet = WorldlineSource::from_trajectory(tr, p, ExternalPotential::free(), AlphaNormalization::rest(1.0)).map_err(err)?;
    let rep2 = near_singularity_diagnostics(&packet, 0.0, &[0.02, 0.03, 0.04, 0.06, 0.08]).map_err(err)?;
    let e = rep2.exponent;
    let ok = slopes_ok && e.is_some_and(|e| e >= 1.9);
    Ok((
        ok,
        format!(
            "∂rS ret {rs:+.4} adv {as_:+.4} (±ω0 = ±1 within 1%); symmetric defect exponent {} (≥ 1.9); static defect {:.1e}",
            e.map_or("undefined".into(), |e| format!("{e:.3}")),
            rep.symmetric_defect.iter().fold(0.0f64, |m, d| m.max(*d)),
        ),
    ))
}

fn newton_consistency(_: Mode) -> Result<(bool, String), String> {
    let f = AnalyticField::new(ModeSum::klein_gordon_packet(1.0, 0.5, 0.25, 0.0, 81), 1.0, ExternalPotential::free());
    let rms = |h: f64| -> Result<f64, String> {
        let tr = integrate_trajectory(&f, FourVector::new(0.0, 0.7, 0.0, 0.0), (0.0, 4.0), &stride(h)).map_err(err)?;
        Ok(newton_residual(&tr, &f).map_err(err)?.rms)
    };
    let (a, b, c) = (rms(0.2)?, rms(0.1)?, rms(0.05)?);
    let (o1, o2) = ((a / b).log2(), (b / c).log2());
    Ok((o1.min(o2) >= 2.0, format!("L2 residual {a:.2e} → {b:.2e} → {c:.2e}, orders {o1:.3}, {o2:.3} (≥ 2)")))
}

fn tuned_run() -> Result<&'static BeamSplitterRun, String> {
    static RUN: OnceLock<Result<BeamSplitterRun, String>> = OnceLock::new();
    RUN.get_or_init(|| {
        let p = BeamSplitterParams::reference();
        let tuned = tune_barrier(&p, 0.5, 0.005).map_err(err)?;
        run_beam_splitter(&p, tuned.amplitude, 1).map_err(err)
    })
    .as_ref()
    .map_err(|e| e.clone())
}

fn free_spreading_ks(seed: u64) -> Result<f64, String> {
    let grid = GridSpec::new(vec![Axis::new(-25.0, 25.0, 1024, true)], 0.01).map_err(err)?;
    let psi = ComplexScalarField::from_fn(grid, 0.0, |x| Complex64::from_polar((-(x[0] + 2.0).powi(2) / 4.0).exp(), x[0]));
    let s = WaveState::new(psi, 1.0, vec![ExternalPotential::free()], WaveRegime::Schrodinger).map_err(err)?;
    let q0 = sample_born::<1>(&s, &EnsembleSpec { n: 10_000, seed, initial_time: 0.0 }).map_err(err)?;
    let res = transport(s, q0, 300, &TransportOptions::default()).map_err(err)?;
    let cdf = GridCdf::new(*res.state.psi.grid.axis(0), &res.state.psi.density().values).ok_or("zero density")?;
    let x: Vec<f64> = res.positions.iter().map(|q| q[0]).collect();
    Ok(ks_one_sample(&x, |v| cdf.cdf(v)))
}

fn equivariance(mode: Mode) -> Result<(bool, String), String> {
    let t = Instant::now();
    let seeds: &[u64] = if mode == Mode::Full { &[1, 2, 3] } else { &[1] };
    let mut free = 0.0f64;
    for &s in seeds {
        free = free.max(free_spreading_ks(s + 100)?);
    }
    let run = tuned_run()?;
    let barrier = run.report.ks_final;
    let secs = t.elapsed().as_secs_f64();
    Ok((
        free < 0.02 && barrier < 0.02 && secs < 300.0,
        format!("KS free spreading {free:.4}, tuned barrier {barrier:.4} at n = 10⁴ (< 0.02), {secs:.0} s (< 300 s)"),
    ))
}

fn beam_splitter_half(_: Mode) -> Result<(bool, String), String> {
    let r = &tuned_run()?.report;
    let ok = (r.reflected_fraction - 0.5).abs() <= 0.02 && r.crossing_pairs == 0 && r.threshold_monotone;
    Ok((
        ok,
        format!(
            "reflected {:.4} (0.50 ± 0.02) at barrier {:.4}, crossings {}, merged {}, single threshold {}",
            r.reflected_fraction, r.barrier_amplitude, r.crossing_pairs, r.merged_pairs, r.threshold_monotone
        ),
    ))
}

fn tachyonic_crossing(_: Mode) -> Result<(bool, String), String> {
    let w = 2f64.sqrt();
    let f = AnalyticField::new(
        ModeSum::new(vec![WaveMode::plane(1.0, [1.0, 0.0, 0.0], w), WaveMode::plane(0.5, [-1.0, 0.0, 0.0], w)]),
        1.0,
        ExternalPotential::free(),
    );
    let tr = integrate_trajectory(&f, FourVector::ZERO, (0.0, 6.0), &stride(0.01)).map_err(err)?;
    if tr.events.is_empty() {
        return Ok((false, "no crossing detected".into()));
    }
    let m2 = tr.events.iter().fold(0.0f64, |m, e| m.max(e.mass_squared.abs()));
    let norm = tr
        .samples
        .iter()
        .filter(|s| s.regime == Regime::Tachyonic)
        .fold(0.0f64, |m, s| m.max((s.dz.square() + 1.0).abs()));
    let ev_m2: Vec<f64> = tr.events.iter().map(|e| e.mass_squared).collect();
    let alpha = alpha_evolution(&ev_m2, AlphaNormalization::rest(1.0)).into_iter().fold(0.0f64, f64::max);
    let ok = tr.status.is_completed() && m2 < 1e-6 && norm < 1e-8 && alpha < 1e-3;
    Ok((
        ok,
        format!(
            "{} crossings, |M²| {m2:.1e} (< 1e-6), |ż·ż + 1| {norm:.1e} (< 1e-8), α at crossing {alpha:.1e} (→ 0)",
            tr.events.len()
        ),
    ))
}

fn epr_audit(mode: Mode) -> Result<(bool, String), String> {
    let t = Instant::now();
    let base = Settings { a: true, b: false };
    let p = EprParams::reference();
    let seeds: &[u64] = if mode == Mode::Full { &[1, 2] } else { &[1] };
    let (mut frac, mut ks) = (1.0f64, 0.0f64);
    for &s in seeds {
        let r = run_epr(&p, base, s).map_err(err)?.report;
        frac = frac.min(r.fraction_dz1_resolved);
        ks = ks.max(r.ks_marginal_z1);
    }
    let product = EprParams { entangled: false, ensemble_n: 2000, ..p };
    let dz_product = run_epr(&product, base, 1).map_err(err)?.report.max_dz1;
    let secs = t.elapsed().as_secs_f64();
    let ok = frac >= 0.9 && ks < 0.02 && dz_product < 1e-8 && secs < 600.0 * seeds.len() as f64;
    Ok((
        ok,
        format!(
            "resolved |Δz1| fraction {frac:.4} (≥ 0.9), marginal KS {ks:.4} (< 0.02), product |Δz1| {dz_product:.1e} (< 1e-8), {secs:.0} s"
        ),
    ))
}

fn cauchy_signature(_: Mode) -> Result<(bool, String), String> {
    let r = record_cauchy_surface(&CauchyParams::reference()).map_err(err)?.report;
    let ok = r.rel_diff_adv > 1e-3 && r.ret_only_max_diff < 1e-10 && r.max_diff_ret < 1e-10;
    Ok((
        ok,
        format!(
            "relative |Δu_adv| {:.2e} (> 1e-3), ret-only |Δu| {:.1e} (< 1e-10), |Δu_adv| inside past cone {:.1e}",
            r.rel_diff_adv, r.ret_only_max_diff, r.max_diff_adv_inside_cone
        ),
    ))
}
