use std::f64::consts::PI;

use dslab_core::farfield::{
    boosted_monopole_reference, field_map, lightcone_roots, monopole_reference, n_soliton_field,
    near_singularity_diagnostics, u_field_point, write_field_map, FarFieldError, FieldQuery, MapWindow, Parts,
    WorldlineSource,
};
use dslab_core::guidance::{integrate_trajectory, AnalyticField, TrajectoryOptions};
use dslab_core::numerics::rng::SeedStream;
use dslab_core::output::RunMeta;
use dslab_core::soliton::{AlphaNormalization, SolitonParams};
use dslab_core::spacetime::{read_container, ContainerValues, FourVector};
use dslab_core::wave::{ExternalPotential, Mode, ModeSum, VectorTerm};
use dslab_core::Complex64;
use proptest::prelude::*;

fn params() -> SolitonParams {
    SolitonParams::new(1.0, 1e-3, 1.0).unwrap()
}

fn plane(k: f64, omega0: f64) -> AnalyticField {
    let w = (omega0 * omega0 + k * k).sqrt();
    AnalyticField::new(ModeSum::new(vec![Mode::plane(1.0, [k, 0.0, 0.0], w)]), omega0, ExternalPotential::free())
}

fn opts(stride: f64) -> TrajectoryOptions {
    TrajectoryOptions { stride, ..Default::default() }
}

/// Rest worldline through `(λ, x0, 0, 0)` for `λ ∈ [−span, span]`.
fn static_source(x0: f64, span: f64) -> WorldlineSource {
    let tr = integrate_trajectory(&plane(0.0, 1.0), FourVector::new(-span, x0, 0.0, 0.0), (-span, span), &opts(0.05)).unwrap();
    assert!(tr.status.is_completed());
    WorldlineSource::with_constant_coupling(tr, params(), ExternalPotential::free()).unwrap()
}

/// Worldline with velocity 0.6 through the origin at λ = 0.
fn moving_source() -> WorldlineSource {
    let g = 1.25;
    let z0 = FourVector::new(-40.0 * g, -40.0 * g * 0.6, 0.0, 0.0);
    let f = plane(0.75, 1.0);
    let tr = integrate_trajectory(&f, z0, (-40.0, 40.0), &opts(0.05)).unwrap();
    assert!(tr.status.is_completed());
    WorldlineSource::with_constant_coupling(tr, params(), ExternalPotential::free()).unwrap()
}

fn random_direction(rng: &mut SeedStream) -> [f64; 3] {
    let c = rng.range(-1.0, 1.0);
    let phi = rng.range(0.0, 2.0 * PI);
    let s = (1.0 - c * c).sqrt();
    [s * phi.cos(), s * phi.sin(), c]
}

#[test]
fn static_roots_are_t_minus_and_plus_r() {
    let src = static_source(0.0, 20.0);
    let (r, a) = lightcone_roots(&src, FourVector::new(5.0, 2.0, 0.0, 0.0)).unwrap();
    assert!((r - 3.0).abs() < 1e-10 && (a - 7.0).abs() < 1e-10, "{r} {a}");
    let (r, a) = lightcone_roots(&src, FourVector::new(5.0, 0.0, 1.2, -1.6)).unwrap();
    assert!((r - 3.0).abs() < 1e-10 && (a - 7.0).abs() < 1e-10, "{r} {a}");
}

#[test]
fn moving_source_roots_match_doppler_solution() {
    let src = moving_source();
    // (5 − γλ)² = (4 − γvλ)² has λ = 1/(γ(1−v)) = 2 and λ = 9/(γ(1+v)) = 4.5.
    let (r, a) = lightcone_roots(&src, FourVector::new(5.0, 4.0, 0.0, 0.0)).unwrap();
    assert!((r - 2.0).abs() < 1e-10 && (a - 4.5).abs() < 1e-10, "{r} {a}");
}

#[test]
fn point_on_worldline_has_coincident_roots() {
    let src = static_source(0.0, 20.0);
    let (r, a) = lightcone_roots(&src, FourVector::new(2.0, 0.0, 0.0, 0.0)).unwrap();
    assert!((r - 2.0).abs() < 1e-10 && (a - 2.0).abs() < 1e-10, "{r} {a}");
    let e = u_field_point(&src, &FieldQuery::new(FourVector::new(2.0, 0.0, 0.0, 0.0), Parts::SYMMETRIC)).unwrap_err();
    assert!(matches!(e, FarFieldError::TooClose { .. }), "{e}");
}

#[test]
fn root_outside_span_names_side() {
    let src = static_source(0.0, 10.0);
    let e = lightcone_roots(&src, FourVector::new(8.0, 5.0, 0.0, 0.0)).unwrap_err();
    assert_eq!(e, FarFieldError::NoRoot { side: "advanced" });
    let e = lightcone_roots(&src, FourVector::new(-8.0, 5.0, 0.0, 0.0)).unwrap_err();
    assert_eq!(e, FarFieldError::NoRoot { side: "retarded" });
    // Only the requested side is needed.
    u_field_point(&src, &FieldQuery::new(FourVector::new(8.0, 5.0, 0.0, 0.0), Parts::RETARDED)).unwrap();
}

#[test]
fn static_symmetric_field_is_the_rest_monopole() {
    let src = static_source(0.0, 20.0);
    let mut rng = SeedStream::new(11, 0);
    for _ in 0..100 {
        let t = rng.range(-5.0, 5.0);
        let r = rng.range(0.1, 10.0);
        let d = random_direction(&mut rng);
        let x = FourVector::new(t, r * d[0], r * d[1], r * d[2]);
        let v = u_field_point(&src, &FieldQuery::new(x, Parts::ALL)).unwrap();
        let want = monopole_reference(1.0, 1.0, t, r).unwrap();
        assert!((v.symmetric.unwrap() - want).norm() < 1e-10, "t={t} r={r}");
        let ret = Complex64::from_polar(1.0 / (4.0 * PI * r), -(t - r));
        assert!((v.retarded.unwrap() - ret).norm() < 1e-10);
        let adv = Complex64::from_polar(1.0 / (4.0 * PI * r), -(t + r));
        assert!((v.advanced.unwrap() - adv).norm() < 1e-10);
    }
}

#[test]
fn in_and_out_fields_are_the_half_difference() {
    let src = static_source(0.0, 20.0);
    let v = u_field_point(&src, &FieldQuery::new(FourVector::new(1.0, 2.0, 0.5, 0.0), Parts::ALL)).unwrap();
    let (ret, adv, sym) = (v.retarded.unwrap(), v.advanced.unwrap(), v.symmetric.unwrap());
    let u_in = v.incoming().unwrap();
    assert_eq!(u_in, (adv - ret) * 0.5);
    assert_eq!(v.outgoing().unwrap(), -u_in);
    assert!((ret + u_in - sym).norm() < 1e-16 && (adv - u_in - sym).norm() < 1e-16);
}

#[test]
fn moving_source_is_the_boosted_monopole() {
    let src = moving_source();
    let mut rng = SeedStream::new(12, 0);
    for _ in 0..100 {
        let t = rng.range(-5.0, 5.0);
        let r = rng.range(0.5, 8.0);
        let d = random_direction(&mut rng);
        let x = FourVector::new(t, 0.6 * t + r * d[0], r * d[1], r * d[2]);
        let v = u_field_point(&src, &FieldQuery::new(x, Parts::SYMMETRIC)).unwrap();
        let want = boosted_monopole_reference(1.0, 1.0, 0.6, x).unwrap();
        assert!((v.symmetric.unwrap() - want).norm() < 1e-8, "{x:?}");
    }
}

#[test]
fn boosted_monopole_reduces_and_carries_a_plane_wave_phase() {
    let x = FourVector::new(1.3, 0.4, -2.0, 0.7);
    let r = (0.4f64 * 0.4 + 4.0 + 0.49).sqrt();
    assert_eq!(boosted_monopole_reference(2.0, 3.0, 0.0, x).unwrap(), monopole_reference(2.0, 3.0, 1.3, r).unwrap());
    // Along the source worldline the boosted field's phase is the plane wave
    // e^{i(kx − ωt)} with (ω, k) = ω0γ(1, v), which solves □Ψ = −ω0²Ψ.
    let (w0, v) = (1.5, 0.6);
    let g = 1.0 / (1.0f64 - v * v).sqrt();
    let (k, w) = (w0 * g * v, w0 * g);
    assert!((w * w - k * k - w0 * w0).abs() < 1e-12);
    for t in [-2.0, 0.3, 4.0] {
        // Fixed rest-frame offset so the amplitude factor is constant.
        let p = FourVector::new(t, v * t + 1.0 / g, 0.0, 0.0);
        let u = boosted_monopole_reference(w0, 1.0, v, p).unwrap();
        let ratio = u / Complex64::from_polar(1.0, k * p.x - w * p.t);
        let r0 = boosted_monopole_reference(w0, 1.0, v, FourVector::new(0.0, 1.0 / g, 0.0, 0.0)).unwrap()
            / Complex64::from_polar(1.0, k / g);
        assert!((ratio - r0).norm() < 1e-12 * r0.norm(), "{t}");
    }
    assert!(monopole_reference(1.0, 1.0, 0.0, 0.0).is_err());
    assert!(boosted_monopole_reference(1.0, 1.0, 1.0, x).is_err());
}

#[test]
fn rest_monopole_solves_wave_equation_at_second_order() {
    let u = |p: [f64; 4]| {
        let r = (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
        monopole_reference(1.3, 1.0, p[0], r).unwrap()
    };
    let residual = |h: f64| {
        let pts = [[0.2, 1.0, 0.5, -0.3], [1.0, -2.0, 0.2, 0.9], [-0.7, 0.3, 3.1, 0.0]];
        pts.iter()
            .map(|&p| {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..4 {
                    let (mut a, mut b) = (p, p);
                    a[k] += h;
                    b[k] -= h;
                    let d2 = (u(a) - u(p) * 2.0 + u(b)) / (h * h);
                    acc += if k == 0 { d2 } else { -d2 };
                }
                acc.norm() / u(p).norm().max(1e-3)
            })
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (residual(0.02), residual(0.01));
    assert!(e1 < 1e-3, "{e1}");
    let order = (e1 / e2).log2();
    assert!(order > 1.9, "order {order}");
}

#[test]
fn static_near_singularity_phase_structure() {
    let src = static_source(0.0, 20.0);
    let radii = [0.02, 0.03, 0.05, 0.07, 0.1];
    let rep = near_singularity_diagnostics(&src, 0.0, &radii).unwrap();
    // For a source at rest the symmetric phase is exactly S on Σ.
    assert!(rep.symmetric_defect.iter().all(|d| *d < 1e-13), "{:?}", rep.symmetric_defect);
    assert_eq!(rep.exponent, None);
    let c = rep.expected_coefficient;
    assert!((rep.leading_coefficient - c).abs() < 0.01 * c, "{} {c}", rep.leading_coefficient);
    assert!((rep.retarded_slope - 1.0).abs() < 0.01, "{}", rep.retarded_slope);
    assert!((rep.advanced_slope + 1.0).abs() < 0.01, "{}", rep.advanced_slope);
}

#[test]
fn accelerated_source_recovers_guidance_at_second_order() {
    let b = 0.2;
    let pot = ExternalPotential { vector: VectorTerm::MagneticZ { b }, ..ExternalPotential::with_charge(1.0) };
    let f = AnalyticField::new(ModeSum::new(vec![Mode::plane(1.0, [0.0; 3], 1.0)]), 1.0, pot.clone());
    let tr = integrate_trajectory(&f, FourVector::new(-10.0, 0.5, 0.0, 0.0), (-10.0, 10.0), &opts(0.01)).unwrap();
    let p = SolitonParams::new(1.0, 1e-4, 1.0).unwrap();
    let src = WorldlineSource::from_trajectory(tr, p, pot, AlphaNormalization::rest(1.0)).unwrap();
    let rep = near_singularity_diagnostics(&src, 0.0, &[0.05, 0.07, 0.1, 0.14, 0.2]).unwrap();
    let e = rep.exponent.expect("accelerated source has a nonzero defect");
    assert!(e > 1.9, "exponent {e}, defects {:?}", rep.symmetric_defect);
    assert!((rep.retarded_slope - rep.local_mass).abs() < 0.01 * rep.local_mass);
    assert!((rep.advanced_slope + rep.local_mass).abs() < 0.01 * rep.local_mass);
}

#[test]
fn packet_source_recovers_guidance_at_second_order() {
    let f = AnalyticField::new(ModeSum::klein_gordon_packet(1.0, 0.5, 0.25, 0.0, 81), 1.0, ExternalPotential::free());
    let tr = integrate_trajectory(&f, FourVector::new(-6.0, 0.0, 0.0, 0.0), (-6.0, 6.0), &opts(0.01)).unwrap();
    let src = WorldlineSource::from_trajectory(tr, params(), ExternalPotential::free(), AlphaNormalization::rest(1.0)).unwrap();
    let rep = near_singularity_diagnostics(&src, 0.0, &[0.02, 0.03, 0.04, 0.06, 0.08]).unwrap();
    let e = rep.exponent.expect("nonzero defect");
    assert!(e > 1.9, "exponent {e}, defects {:?}", rep.symmetric_defect);
}

#[test]
fn diagnostics_reject_poor_radius_sets() {
    let src = static_source(0.0, 20.0);
    assert!(matches!(near_singularity_diagnostics(&src, 0.0, &[0.02, 0.03]), Err(FarFieldError::InsufficientRange(_))));
    assert!(matches!(
        near_singularity_diagnostics(&src, 0.0, &[0.02, 0.025, 0.03]),
        Err(FarFieldError::InsufficientRange(_))
    ));
    assert!(matches!(
        near_singularity_diagnostics(&src, 0.0, &[0.005, 0.02, 0.05]),
        Err(FarFieldError::InsufficientRange(_))
    ));
}

#[test]
fn superposition_is_linear_and_single_source_matches() {
    let (a, b) = (static_source(-3.0, 25.0), static_source(4.0, 25.0));
    let x = FourVector::new(0.5, 1.0, 2.0, -1.0);
    let ua = u_field_point(&a, &FieldQuery::new(x, Parts::SYMMETRIC)).unwrap().symmetric.unwrap();
    let ub = u_field_point(&b, &FieldQuery::new(x, Parts::SYMMETRIC)).unwrap().symmetric.unwrap();
    assert_eq!(n_soliton_field(std::slice::from_ref(&a), x).unwrap(), ua);
    assert_eq!(n_soliton_field(&[a, b], x).unwrap(), ua + ub);
}

#[test]
fn two_source_fields_respect_symmetry_and_bound() {
    let d = 50.0;
    let (a, b) = (static_source(-d / 2.0, 80.0), static_source(d / 2.0, 80.0));
    let mut rng = SeedStream::new(13, 0);
    for _ in 0..20 {
        let x = FourVector::new(rng.range(-5.0, 5.0), rng.range(-30.0, 30.0), rng.range(-3.0, 3.0), 0.4);
        let mirrored = FourVector::new(x.t, -x.x, x.y, x.z);
        let u1 = n_soliton_field(&[a.clone(), b.clone()], x).unwrap();
        let u2 = n_soliton_field(&[b.clone(), a.clone()], mirrored).unwrap();
        assert!((u1 - u2).norm() < 1e-12, "{x:?}");
    }
    // Near source a the field is a's own plus at most g/(4π(d − r)).
    let x = FourVector::new(1.0, -d / 2.0 + 0.5, 0.0, 0.0);
    let own = u_field_point(&a, &FieldQuery::new(x, Parts::SYMMETRIC)).unwrap().symmetric.unwrap();
    let both = n_soliton_field(&[a.clone(), b.clone()], x).unwrap();
    assert!((both - own).norm() <= 1.0 / (4.0 * PI * (d - 0.5)));
    let e = n_soliton_field(&[a, static_source(0.0, 2.0)], x).unwrap_err();
    assert!(matches!(e, FarFieldError::Source { index: 1, .. }), "{e}");
}

#[test]
fn query_guards() {
    let src = static_source(0.0, 20.0);
    let none = Parts { retarded: false, advanced: false, symmetric: false };
    assert_eq!(u_field_point(&src, &FieldQuery::new(FourVector::ZERO, none)).unwrap_err(), FarFieldError::NoParts);
    let e = u_field_point(&src, &FieldQuery::new(FourVector::new(0.0, 0.005, 0.0, 0.0), Parts::ALL)).unwrap_err();
    assert!(matches!(e, FarFieldError::TooClose { floor, .. } if (floor - 0.01).abs() < 1e-15));
}

#[test]
fn coarse_worldline_is_refused_at_load() {
    let f = plane(0.0, 1.0);
    let tr = integrate_trajectory(&f, FourVector::ZERO, (0.0, 20.0), &opts(2.0)).unwrap();
    let e = WorldlineSource::with_constant_coupling(tr, params(), ExternalPotential::free()).unwrap_err();
    assert!(matches!(e, FarFieldError::StrideTooCoarse { .. }), "{e}");
}

#[test]
fn field_map_round_trips_and_flags_the_core() {
    let src = static_source(0.0, 20.0);
    let w = MapWindow::t_x((-2.0, 2.0, 9), (-4.0, 4.0, 17));
    let map = field_map(std::slice::from_ref(&src), &w, Parts::ALL).unwrap();
    // x = 0 is on the worldline.
    let g = map.grid().clone();
    for i in 0..9 {
        for j in 0..17 {
            let flat = g.flat_index(&[i, j]);
            assert_eq!(map.valid[flat], j != 8);
            if j != 8 {
                let (t, x) = (g.axis(0).coord(i), g.axis(1).coord(j));
                let want = monopole_reference(1.0, 1.0, t, x.abs()).unwrap();
                assert!((map.symmetric.values[flat] - want).norm() < 1e-10);
            } else {
                assert!(map.symmetric.values[flat].re.is_nan());
            }
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let paths = write_field_map(dir.path(), "m", &map, &RunMeta::new("fm", 3, "h")).unwrap();
    assert_eq!(paths.len(), 4);
    let c = read_container(&mut std::fs::File::open(&paths[0]).unwrap()).unwrap();
    assert!(c.metadata.contains("run_id=fm") && c.metadata.contains("axes=tx") && c.metadata.contains("part=u_sym"));
    match c.values {
        ContainerValues::Complex(v) => assert_eq!(v.len(), 9 * 17),
        _ => panic!("expected complex payload"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn roots_swap_under_time_reflection(t in -6.0f64..6.0, x in -5.0f64..5.0, y in -5.0f64..5.0) {
        prop_assume!(x.abs() + y.abs() > 0.1);
        let src = moving_source();
        let refl = src.time_reflected();
        let (r, a) = lightcone_roots(&src, FourVector::new(t, x, y, 0.0)).unwrap();
        let (r2, a2) = lightcone_roots(&refl, FourVector::new(-t, x, y, 0.0)).unwrap();
        prop_assert!((r2 + a).abs() < 1e-10, "{} {}", r2, a);
        prop_assert!((a2 + r).abs() < 1e-10, "{} {}", a2, r);
    }

    #[test]
    fn roots_lie_on_the_light_cone(t in -6.0f64..6.0, x in -5.0f64..5.0, z in -5.0f64..5.0) {
        prop_assume!(x.abs() + z.abs() > 0.1);
        let src = moving_source();
        let q = FourVector::new(t, x, 0.0, z);
        let (r, a) = lightcone_roots(&src, q).unwrap();
        for l in [r, a] {
            let p = src.traj.at_lambda(l).unwrap();
            let d = q - p.z;
            prop_assert!(d.square().abs() < 1e-9 * d.euclidean_norm().powi(2));
        }
    }
}
