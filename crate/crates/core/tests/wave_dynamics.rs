use dslab_core::spacetime::{ComplexScalarField, FourVector, GridSpec};
use dslab_core::wave::{
    continuity_residual, evolve, klein_gordon_charge, make_reference_wave, mass_field, variable_mass_squared,
    ExternalPotential, ReferenceKind, Regime, ScalarTerm, TimeGate, WaveError, WaveState,
};
use dslab_core::Complex64;

fn gaussian(x: f64, x0: f64, sigma: f64, k0: f64) -> Complex64 {
    Complex64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), k0 * x)
}

fn schrodinger_packet(n: usize, dt: f64, k0: f64, potential: ExternalPotential) -> WaveState {
    let grid = GridSpec::line(-20.0, 20.0, n, true, dt).unwrap();
    let psi = ComplexScalarField::from_fn(grid, 0.0, |p| gaussian(p[0], 0.0, 1.0, k0));
    WaveState::new(psi, 1.0, vec![potential], Regime::Schrodinger).unwrap()
}

fn width(state: &WaveState) -> f64 {
    let g = &state.psi.grid;
    let rho: Vec<f64> = state.psi.values.iter().map(|v| v.norm_sqr()).collect();
    let norm: f64 = rho.iter().sum();
    let mean: f64 = (0..g.len()).map(|i| g.point(i)[0] * rho[i]).sum::<f64>() / norm;
    ((0..g.len()).map(|i| (g.point(i)[0] - mean).powi(2) * rho[i]).sum::<f64>() / norm).sqrt()
}

#[test]
fn free_gaussian_spreads_as_predicted() {
    let s = schrodinger_packet(1024, 0.005, 0.0, ExternalPotential::free());
    let s = evolve(s, 400).unwrap();
    assert!((s.time() - 2.0).abs() < 1e-12);
    let w = width(&s);
    assert!((w - 2f64.sqrt()).abs() < 0.01 * 2f64.sqrt(), "width {w}");
}

#[test]
fn schrodinger_plane_wave_is_an_eigenstate() {
    let n = 256;
    let l = 10.0;
    let grid = GridSpec::line(0.0, l, n, true, 0.01).unwrap();
    let k = 2.0 * std::f64::consts::PI / l * 3.0;
    let psi = ComplexScalarField::from_fn(grid.clone(), 0.0, |p| Complex64::from_polar(1.0, k * p[0]));
    let s0 = WaveState::new(psi.clone(), 1.0, vec![ExternalPotential::free()], Regime::Schrodinger).unwrap();
    let steps = 500;
    let s = evolve(s0, steps).unwrap();
    let h = grid.axis(0).spacing();
    // Discrete eigenvalue of the lattice Hamiltonian and its Cayley phase.
    let e = (1.0 - (k * h).cos()) / (h * h);
    let omega = 2.0 * (0.5 * grid.dt() * e).atan() / grid.dt();
    for (a, b) in s.psi.values.iter().zip(&psi.values) {
        assert!((a.norm() - 1.0).abs() < 1e-10);
        let expected = Complex64::from_polar(1.0, -omega * grid.dt() * steps as f64);
        let dphi = (a / b / expected).arg();
        assert!(dphi.abs() < 1e-6, "{dphi}");
    }
    // The continuum frequency k²/2 agrees to discretization order.
    assert!((omega - 0.5 * k * k).abs() < 1e-3 * omega);
}

#[test]
fn schrodinger_norm_is_conserved_with_gated_barrier() {
    let pot = ExternalPotential::with_charge(1.0).push(ScalarTerm::Gaussian {
        axis: 0,
        center: 2.0,
        width: 0.3,
        amplitude: 3.0,
        gate: TimeGate::from(0.5),
    });
    let s0 = schrodinger_packet(512, 0.002, 2.0, pot);
    let n0 = s0.psi.norm_squared();
    let s = evolve(s0, 1000).unwrap();
    let drift = (s.psi.norm_squared() - n0).abs() / n0;
    assert!(drift < 1e-8, "relative norm drift {drift}");
}

#[test]
fn two_particle_norm_is_conserved() {
    let grid = GridSpec::new(
        vec![
            dslab_core::spacetime::Axis::new(-10.0, 10.0, 64, true),
            dslab_core::spacetime::Axis::new(-10.0, 10.0, 64, true),
        ],
        0.01,
    )
    .unwrap();
    let psi = ComplexScalarField::from_fn(grid, 0.0, |p| {
        gaussian(p[0], -2.0, 1.0, -1.0) * gaussian(p[1], 2.0, 1.0, 1.0) + gaussian(p[0], -2.0, 1.0, -2.0) * gaussian(p[1], 2.0, 1.0, 2.0)
    });
    let barrier = ExternalPotential::with_charge(1.0).push(ScalarTerm::Gaussian {
        axis: 0,
        center: 4.0,
        width: 0.4,
        amplitude: 1.0,
        gate: TimeGate::ALWAYS,
    });
    let s0 = WaveState::new(psi, 1.0, vec![ExternalPotential::free(), barrier], Regime::Schrodinger).unwrap();
    let n0 = s0.psi.norm_squared();
    let s = evolve(s0, 1000).unwrap();
    assert!((s.psi.norm_squared() - n0).abs() / n0 < 1e-8);
}

#[test]
fn constant_potential_is_a_pure_phase_rotation() {
    let base = schrodinger_packet(512, 0.01, 1.0, ExternalPotential::with_charge(0.7));
    let shifted = schrodinger_packet(512, 0.01, 1.0, ExternalPotential::with_charge(0.7).push(ScalarTerm::Constant { value: 0.4 }));
    let a = evolve(base, 200).unwrap();
    let b = evolve(shifted, 200).unwrap();
    let rot = Complex64::from_polar(1.0, -0.7 * 0.4 * a.time());
    for (u, v) in a.psi.values.iter().zip(&b.psi.values) {
        assert!((u.norm_sqr() - v.norm_sqr()).abs() < 1e-8);
        assert!((u * rot - v).norm() < 1e-8);
    }
    // ∂tS shifts by −e·c; the covariant p_t = ∂tS + eV and hence M² are unchanged.
    let kg = |c: f64| {
        let mut pot = ExternalPotential::with_charge(0.7);
        if c != 0.0 {
            pot = pot.push(ScalarTerm::Constant { value: c });
        }
        let grid = GridSpec::line(-20.0, 20.0, 801, true, 0.01).unwrap();
        let psi = ComplexScalarField::from_fn(grid.clone(), 0.0, |p| gaussian(p[0], 0.0, 2.0, 0.5));
        // Start from a gauge-transformed copy so ψ_t carries −iec ψ.
        let w = (1.0f64 + 0.25).sqrt();
        let d: Vec<Complex64> = psi.values.iter().map(|v| v * Complex64::new(0.0, -(w + 0.7 * c))).collect();
        let s = WaveState::klein_gordon_from_derivative(psi, &d, 1.0, pot).unwrap();
        evolve(s, 300).unwrap()
    };
    let (u, v) = (kg(0.0), kg(0.4));
    let (mu, mv) = (mass_field(&u).unwrap(), mass_field(&v).unwrap());
    for i in (0..801).step_by(40) {
        if let (Some(a), Some(b)) = (mu.mass_squared.get(i), mv.mass_squared.get(i)) {
            assert!((a - b).abs() < 1e-8, "M² {a} vs {b}");
            assert!((mu.p_t[i] - mv.p_t[i]).abs() < 1e-8);
            assert!((u.psi.values[i].norm_sqr() - v.psi.values[i].norm_sqr()).abs() < 1e-8);
        }
    }
}

#[test]
fn klein_gordon_charge_is_conserved() {
    let grid = GridSpec::line(-30.0, 30.0, 1201, true, 0.02).unwrap();
    let psi = ComplexScalarField::from_fn(grid, 0.0, |p| gaussian(p[0], -5.0, 2.0, 1.0));
    let w = 2f64.sqrt();
    let d: Vec<Complex64> = psi.values.iter().map(|v| v * Complex64::new(0.0, -w)).collect();
    let pot = ExternalPotential::with_charge(1.0).push(ScalarTerm::Gaussian {
        axis: 0,
        center: 0.0,
        width: 1.0,
        amplitude: 0.5,
        gate: TimeGate::ALWAYS,
    });
    let s0 = WaveState::klein_gordon_from_derivative(psi, &d, 1.0, pot).unwrap();
    let s1 = evolve(s0, 1).unwrap();
    let q0 = klein_gordon_charge(&s1).unwrap();
    let s = evolve(s1, 1000).unwrap();
    let q1 = klein_gordon_charge(&s).unwrap();
    assert!(((q1 - q0) / q0).abs() < 1e-6, "{q0} -> {q1}");
}

#[test]
fn klein_gordon_dispersion_converges_at_second_order() {
    let omega0 = 1.0;
    let k = 2.0 * std::f64::consts::PI / 10.0;
    let exact = (omega0 * omega0 + k * k).sqrt();
    let err = |n: usize| {
        let dx = 10.0 / n as f64;
        let grid = GridSpec::line(0.0, 10.0, n, true, 0.4 * dx).unwrap();
        let s0 = make_reference_wave(ReferenceKind::Plane { k }, omega0, grid.clone(), 0.0).unwrap();
        let steps = (2.0 / grid.dt()).round() as usize;
        let s = evolve(s0, steps).unwrap();
        let phase = (s.psi.values[0] / s.prev.as_ref().unwrap().values[0]).arg();
        (-phase / grid.dt() - exact).abs()
    };
    let (e1, e2) = (err(64), err(128));
    assert!(e1 < 1e-2 && e1 / e2 > 3.5, "{e1} {e2}");
}

#[test]
fn leapfrog_rejects_large_steps() {
    let grid = GridSpec::line(0.0, 10.0, 101, true, 0.06).unwrap();
    let s = make_reference_wave(ReferenceKind::Plane { k: 1.0 }, 1.0, grid, 0.0).unwrap();
    assert!(matches!(evolve(s, 1), Err(WaveError::Stability { .. })));
}

#[test]
fn non_finite_values_abort() {
    let mut s = schrodinger_packet(64, 0.01, 0.0, ExternalPotential::free());
    s.psi.values[5] = Complex64::new(f64::NAN, 0.0);
    assert!(matches!(evolve(s, 3), Err(WaveError::NonFinite { step: 1, .. })));
}

#[test]
fn reference_mass_squared_values() {
    let grid = GridSpec::line(0.0, 6.0, 601, false, 0.005).unwrap();
    let cases = [
        (ReferenceKind::Plane { k: 0.75 }, 1.0),
        (ReferenceKind::Standing { k: 1.0, omega: None }, 2.0),
        (ReferenceKind::Evanescent { kappa: 0.5, omega: None, test_mode: false }, 0.75),
        (ReferenceKind::Evanescent { kappa: 1.2, omega: None, test_mode: true }, -0.44),
        (ReferenceKind::BoostedMonopolePhase { v: 0.6 }, 1.0),
    ];
    for (kind, expect) in cases {
        let s = make_reference_wave(kind, 1.0, grid.clone(), 0.0).unwrap();
        let m = variable_mass_squared(&s, FourVector::new(0.0, 2.1, 0.0, 0.0)).unwrap();
        assert!((m.mass_squared - expect).abs() < 1e-4, "{kind:?}: {}", m.mass_squared);
        let mf = mass_field(&s).unwrap();
        let valid: Vec<usize> = (0..grid.len()).filter(|&i| mf.mass_squared.valid[i]).collect();
        let good = valid.iter().filter(|&&i| (mf.mass_squared.field.values[i] - expect).abs() < 1e-3).count();
        assert!(good as f64 >= 0.95 * valid.len() as f64, "{kind:?}: {good}/{}", valid.len());
        if !matches!(kind, ReferenceKind::Evanescent { test_mode: true, .. }) {
            // Both sides of the mass relation agree for genuine solutions.
            assert!((m.kinematic - m.mass_squared).abs() < 1e-4, "{kind:?}: kinematic {}", m.kinematic);
        }
    }
}

#[test]
fn continuity_residual_checks() {
    let grid = GridSpec::line(0.0, 10.0, 200, true, 0.01).unwrap();
    let plane = make_reference_wave(ReferenceKind::Plane { k: 2.0 * std::f64::consts::PI / 5.0 }, 1.0, grid, 0.0).unwrap();
    assert!(continuity_residual(&plane).unwrap().max_abs() < 1e-10);

    let l2 = |n: usize| {
        let dt = 8.0 / n as f64;
        let s = schrodinger_packet(n, dt, 1.0, ExternalPotential::free());
        let s = evolve(s, (1.0 / dt).round() as usize).unwrap();
        continuity_residual(&s).unwrap().l2
    };
    let (a, b, c) = (l2(256), l2(512), l2(1024));
    assert!((a / b).log2() >= 1.9 && (b / c).log2() >= 1.9, "{a} {b} {c}");

    let mut s = evolve(schrodinger_packet(512, 0.01, 1.0, ExternalPotential::free()), 5).unwrap();
    let clean = continuity_residual(&s).unwrap().max_abs();
    for (i, v) in s.psi.values.iter_mut().enumerate() {
        if i >= 256 {
            *v *= 1.5;
        }
    }
    let bad = continuity_residual(&s).unwrap();
    assert!(bad.max_abs() > 100.0 * clean && bad.count_above(10.0 * clean) > 0);
}
