use std::f64::consts::PI;

use dslab_core::guidance::{integrate_trajectory, AnalyticField, Regime, TrajectoryOptions, TrajectorySample};
use dslab_core::soliton::{
    alpha_evolution, b_evolution, compression_residual, interpolated_profile, lane_emden_profile, lane_emden_residual,
    phase_harmony_phase, solve_radial_profile, tachyonic_profile, AlphaNormalization, Exponent, RadialOptions, ResidualMode,
    SolitonError, SolitonParams,
};
use dslab_core::spacetime::FourVector;
use dslab_core::wave::{ExternalPotential, Mode, ModeSum, VectorTerm};
use proptest::prelude::*;

/// `g0 = 4π`, `l0 = 1`; ω0 is small enough to satisfy the core condition.
fn unit() -> SolitonParams {
    SolitonParams::new(4.0 * PI, 1.0, 0.01).unwrap()
}

#[test]
fn profile_closed_form_values() {
    let p = unit();
    assert!((lane_emden_profile(&p, 1.0, 0.0) - 1.0).abs() < 1e-15);
    for r in [0.1, 1.0, 10.0] {
        let a = lane_emden_profile(&p, 4.0, r);
        let b = 2.0 * lane_emden_profile(&p, 1.0, 4.0 * r);
        assert!((a - b).abs() <= 1e-14 * a.abs());
    }
    let alpha = 2.0;
    let r = 1e6 * p.l0 / alpha;
    let far = r * lane_emden_profile(&p, alpha, r);
    assert!((far - p.charge() / alpha.sqrt()).abs() < 1e-6);
}

#[test]
fn params_enforce_small_core() {
    assert!(SolitonParams::new(1.0, 1.0, 1.0).is_err());
    assert!(SolitonParams::new(1.0, 0.01, 1.0).is_ok());
    assert!(SolitonParams::unconstrained(1.0, 1.0, 1.0).is_ok());
    assert!(SolitonParams::unconstrained(-1.0, 1.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn dilation_invariance(alpha in 0.01f64..100.0, r in 0.0f64..1e3) {
        let p = unit();
        let a = lane_emden_profile(&p, alpha, r);
        let b = alpha.sqrt() * lane_emden_profile(&p, 1.0, alpha * r);
        prop_assert!((a - b).abs() <= 1e-14 * a.abs());
    }
}

fn radii() -> Vec<f64> {
    (1..=2000).map(|i| 1e-3 * 10f64.powf(6.0 * i as f64 / 2000.0)).collect()
}

#[test]
fn lane_emden_profile_is_exact() {
    let p = unit();
    for alpha in [0.5, 1.0, 2.0, 7.0] {
        let res = lane_emden_residual(&p, alpha, &radii(), ResidualMode::Analytic, Exponent::LANE_EMDEN);
        let worst = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(worst < 1e-12, "α = {alpha}: {worst}");
    }
}

#[test]
fn finite_difference_residual_converges() {
    let p = unit();
    let r = [0.5, 1.0, 2.0, 3.0];
    let max = |dr: f64| {
        lane_emden_residual(&p, 1.0, &r, ResidualMode::FiniteDifference { dr }, Exponent::LANE_EMDEN)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    };
    let ratio = max(0.02) / max(0.01);
    assert!(ratio >= 3.5, "{ratio}");
}

#[test]
fn wrong_exponent_gives_order_one_residual() {
    let p = unit();
    let res = lane_emden_residual(&p, 1.0, &[0.5, 1.0], ResidualMode::Analytic, Exponent(3));
    assert!(res.iter().any(|r| r.abs() > 0.1), "{res:?}");
}

#[test]
fn static_radial_profile_is_lane_emden() {
    let p = SolitonParams::new(4.0 * PI, 0.01, 1.0).unwrap();
    let prof = solve_radial_profile(&p, 1.5, 0.0, 20.0, &RadialOptions::default()).unwrap();
    for (r, f) in prof.r.iter().zip(&prof.f) {
        let exact = lane_emden_profile(&p, 1.5, *r);
        assert!((f - exact).abs() < 1e-8 * exact, "r = {r}: {f} vs {exact}");
    }
}

/// Largest deviation from the interpolated profile on `[0, 3/ω]`, skipping
/// bands of 5% of the zero spacing around each zero of cos ωr. Returns the
/// pointwise relative deviation, the deviation relative to the envelope
/// `(√α g0/4π)/√(α²r² + l0²)` and the fitted far-field phase.
fn interpolation_deviation(omega_l0: f64) -> (f64, f64, f64) {
    let p = SolitonParams::new(4.0 * PI, 0.01, omega_l0 / 0.01).unwrap();
    let omega = omega_l0 / p.l0;
    let prof = solve_radial_profile(&p, 1.0, omega, 12.0 * PI / omega, &RadialOptions { n_out: 8001, ..Default::default() })
        .unwrap();
    let half_band = 0.025 * PI / omega;
    let (mut pointwise, mut envelope) = (0.0f64, 0.0f64);
    for (r, f) in prof.r.iter().zip(&prof.f) {
        if *r > 3.0 / omega {
            break;
        }
        let near_zero = (0..3).any(|j| (r - (j as f64 + 0.5) * PI / omega).abs() < half_band);
        if near_zero {
            continue;
        }
        let g = interpolated_profile(&p, 1.0, omega, *r);
        pointwise = pointwise.max(((f - g) / g).abs());
        envelope = envelope.max(((f - g) / lane_emden_profile(&p, 1.0, *r)).abs());
    }
    (pointwise, envelope, prof.far_phase)
}

#[test]
fn radial_profile_matches_interpolation_for_very_small_cores() {
    // The nonlinear core shifts the far-field phase by O(ω·l0); at
    // ω·l0 = 1e-3 that stays well below the envelope.
    let (_, env, _) = interpolation_deviation(0.001);
    assert!(env < 0.01, "{env}");
}

#[test]
fn far_phase_shift_scales_with_core_size() {
    let (_, _, d1) = interpolation_deviation(0.01);
    let (_, _, d2) = interpolation_deviation(0.001);
    let ratio = d1 / d2;
    assert!((ratio - 10.0).abs() < 0.5, "{d1} {d2}");
}

#[test]
fn radial_far_field_is_a_cosine_monopole() {
    let p = SolitonParams::new(4.0 * PI, 0.01, 1.0).unwrap();
    let omega = 1.0;
    let prof = solve_radial_profile(&p, 1.0, omega, 40.0, &RadialOptions::default()).unwrap();
    assert!((prof.far_amplitude - p.charge()).abs() < 1e-9 * p.charge());
    // Envelope fit residual over the far region.
    let mut worst: f64 = 0.0;
    for (r, f) in prof.r.iter().zip(&prof.f) {
        if omega * r < 10.0 {
            continue;
        }
        let model = prof.far_amplitude * (omega * r + prof.far_phase).cos() / r;
        worst = worst.max((f - model).abs() * r / prof.far_amplitude);
    }
    assert!(worst < 0.02, "{worst}");
}

#[test]
fn radial_solver_rejects_large_cores() {
    let p = SolitonParams::unconstrained(1.0, 1.0, 1.0).unwrap();
    assert!(matches!(solve_radial_profile(&p, 1.0, 0.5, 10.0, &RadialOptions::default()), Err(SolitonError::InvalidParams(_))));
}

#[test]
fn alpha_follows_the_variable_mass() {
    let w0 = 1.0;
    let norm = AlphaNormalization::rest(w0);
    assert_eq!(alpha_evolution(&[1.0, 1.0], norm), vec![1.0, 1.0]);
    let a = alpha_evolution(&[2.0], norm)[0];
    assert!((a - 2f64.powf(0.25)).abs() < 1e-15);
    let near = alpha_evolution(&[1e-12, 1e-20], norm);
    assert!(near[0] < 1e-2 && near[1] < 1e-4);
    // Constant of motion: α² ω0 = |M| exactly.
    for m2 in [0.3, 2.0, -7.0] {
        let a = alpha_evolution(&[m2], norm)[0];
        assert!((a * a * w0 - f64::abs(m2).sqrt()).abs() < 1e-10);
    }
}

#[test]
fn b_vanishes_for_uniform_motion_and_tracks_oscillating_mass() {
    let l: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
    let b = b_evolution(&l, &vec![1.0; 200], 1.0);
    assert!(b.iter().all(|s| s.b.abs() < 1e-12 && !s.flagged));
    let (w0, eps, om) = (1.0, 0.01, 2.0);
    let err = |h: f64| {
        let l: Vec<f64> = (0..(10.0 / h) as usize).map(|i| i as f64 * h).collect();
        let m2: Vec<f64> = l.iter().map(|t| (w0 * (1.0 + eps * (om * t).sin())).powi(2)).collect();
        let b = b_evolution(&l, &m2, w0);
        (1..l.len() - 1).map(|k| (b[k].b - 0.5 * w0 * eps * om * (om * l[k]).cos()).abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (err(0.02), err(0.01));
    assert!(e1 < 1e-4 && e1 / e2 > 3.5, "{e1} {e2}");
}

#[test]
fn compression_identity_holds_at_second_order() {
    let residual = |h: f64| {
        let l: Vec<f64> = (0..(8.0 / h) as usize).map(|i| i as f64 * h).collect();
        let m2: Vec<f64> = l.iter().map(|t| 1.0 + 0.3 * (1.3 * t).sin()).collect();
        let a = alpha_evolution(&m2, AlphaNormalization::rest(1.0));
        let b = b_evolution(&l, &m2, 1.0);
        compression_residual(&l, &a, &b, &m2).iter().fold(0.0f64, |m, v| m.max(v.abs()))
    };
    let (r1, r2) = (residual(0.02), residual(0.01));
    assert!((r1 / r2).log2() > 1.9, "{r1} {r2}");
}

#[test]
fn trajectory_alpha_vanishes_at_the_light_cone() {
    let f = AnalyticField::new(
        ModeSum::new(vec![Mode::plane(1.0, [1.0, 0.0, 0.0], 2f64.sqrt()), Mode::plane(0.5, [-1.0, 0.0, 0.0], 2f64.sqrt())]),
        1.0,
        ExternalPotential::free(),
    );
    let tr = integrate_trajectory(&f, FourVector::ZERO, (0.0, 6.0), &TrajectoryOptions::default()).unwrap();
    let ev = tr.events[0];
    let a = alpha_evolution(&[ev.mass_squared], AlphaNormalization::rest(1.0))[0];
    assert!(a < 1e-3, "{a}");
    let b = b_evolution(
        &tr.samples.iter().map(|s| s.lambda).collect::<Vec<_>>(),
        &tr.samples.iter().map(|s| s.mass_squared).collect::<Vec<_>>(),
        1.0,
    );
    let crossing = tr.samples.iter().position(|s| s.regime != Regime::Subluminal).unwrap();
    assert!(b[crossing].flagged || b[crossing - 1].flagged);
}

fn sample(z: FourVector, dz: FourVector, action: f64) -> TrajectorySample {
    TrajectorySample { lambda: 0.0, z, dz, mass_squared: 1.0, regime: Regime::Subluminal, action }
}

#[test]
fn phase_harmony_contact_conditions() {
    let w0 = 1.0;
    let z = FourVector::new(1.0, 2.0, 0.0, 0.0);
    let (g, v) = (1.25, 0.6);
    let dz = FourVector::new(g, g * v, 0.0, 0.0);
    let s = sample(z, dz, 0.7);
    let free = ExternalPotential::free();
    assert_eq!(phase_harmony_phase(&s, 0.3, &free, z, w0).unwrap(), 0.7);
    // Spacelike unit vectors in Σ: orthogonal to ż.
    let eta = [FourVector::new(g * v, g, 0.0, 0.0), FourVector::new(0.0, 0.0, 1.0, 0.0), FourVector::new(0.0, 0.0, 0.6, 0.8)];
    for e in eta {
        for eps in [0.01, 0.03] {
            let phi = phase_harmony_phase(&s, 0.0, &free, z + e * eps, w0).unwrap();
            assert!((phi - 0.7).abs() < 1e-14);
        }
    }
    let pot = ExternalPotential { vector: VectorTerm::Uniform([0.4, -0.2, 0.1]), ..ExternalPotential::with_charge(1.5) };
    let eps = 1e-3;
    for e in eta {
        let fd = (phase_harmony_phase(&s, 0.8, &pot, z + e * eps, w0).unwrap()
            - phase_harmony_phase(&s, 0.8, &pot, z - e * eps, w0).unwrap())
            / (2.0 * eps);
        let ea = pot.e_four_potential(z);
        let expected = -dslab_core::minkowski_dot(ea, e);
        assert!((fd - expected).abs() < 1e-6, "{fd} vs {expected}");
    }
    assert!(matches!(
        phase_harmony_phase(&s, 0.0, &free, z + eta[1] * 0.2, w0),
        Err(SolitonError::OutsideNearField { .. })
    ));
}

#[test]
fn tachyonic_profile_limits() {
    let p = SolitonParams::new(4.0 * PI, 0.01, 1.0).unwrap();
    let (y, z) = (0.3, 0.4);
    let t = tachyonic_profile(&p, 1.3, 0.0, y, z);
    assert!(t.valid && (t.value - lane_emden_profile(&p, 1.3, 0.5)).abs() < 1e-15);
    let o = tachyonic_profile(&p, 2.0, 0.0, 0.0, 0.0);
    assert!((o.value - 2f64.sqrt() * p.charge() / p.l0).abs() < 1e-12);
    // Near the singular hyperboloid y² + z² − x''² = −(l0/α)².
    let alpha = 1.0;
    let on = (p.l0 / alpha).powi(2);
    assert!(!tachyonic_profile(&p, alpha, on.sqrt(), 0.0, 0.0).valid);
    assert!(tachyonic_profile(&p, alpha, 0.5 * on.sqrt(), 0.0, 0.0).valid);
    for x in [1.0, 10.0, 100.0] {
        assert!(tachyonic_profile(&p, 1e-6, x, 0.0, 0.0).valid);
    }
}

