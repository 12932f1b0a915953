use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_dispersion, check_resolution, Barrier, LineGrid, Packet, ScenarioError, SpongeSpec};
use crate::guidance::{sample_born, transport, EnsembleSpec, TransportOptions};
use crate::numerics::stats::ks_two_sample;
use crate::spacetime::{ComplexScalarField, GridSpec};
use crate::wave::{evolve, ExternalPotential, Regime, WaveState};

/// Local settings: whether each particle's barrier is switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub a: bool,
    pub b: bool,
}

impl Settings {
    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }
}

/// Two particles leaving the origin region in opposite directions, with
/// momenta correlated across two branches `k_a`, `k_b`.
///
/// Particle 1 starts at `−separation` moving left, particle 2 at
/// `+separation` moving right. Each has a barrier at `∓barrier.center`,
/// switched on at `barrier.on` when its setting is set. The geometry is
/// symmetric under `(x1, x2) → (−x2, −x1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EprParams {
    pub mass: f64,
    pub grid: LineGrid,
    pub dt: f64,
    pub t_end: f64,
    pub separation: f64,
    pub sigma: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub entangled: bool,
    pub barrier: Barrier,
    #[serde(default)]
    pub sponge: Option<SpongeSpec>,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    pub ensemble_n: usize,
    /// Members re-integrated at doubled substeps to estimate the integrator error.
    #[serde(default = "default_tol_probe")]
    pub tolerance_probe: usize,
}

fn default_substeps() -> usize {
    4
}

fn default_tol_probe() -> usize {
    64
}

/// Largest marginal mass allowed on the partner's side when the settings engage.
const SEPARATION_LEAK: f64 = 1e-6;

impl EprParams {
    pub fn reference() -> Self {
        Self {
            mass: 1.0,
            grid: LineGrid { min: -32.0, max: 32.0, n: 384, periodic: true },
            dt: 0.01,
            t_end: 8.0,
            separation: 6.0,
            sigma: 1.0,
            k_a: 1.0,
            k_b: 1.6,
            entangled: true,
            barrier: Barrier { center: 9.0, width: 0.5, amplitude: 2.6, on: Some(0.5) },
            sponge: Some(SpongeSpec { width: 4.0, strength: 2.0 }),
            substeps: 4,
            ensemble_n: 10_000,
            tolerance_probe: 64,
        }
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    fn gate(&self) -> f64 {
        self.barrier.on.unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Config(m));
        if !(self.mass > 0.0 && self.sigma > 0.0 && self.barrier.width > 0.0) {
            return bad("mass, sigma and barrier width must be positive".into());
        }
        if !(self.dt > 0.0 && self.t_end > 0.0) {
            return bad(format!("need dt > 0 and t_end > 0, got {} and {}", self.dt, self.t_end));
        }
        if self.substeps == 0 {
            return bad("substeps must be positive".into());
        }
        if !(self.gate() >= 0.0 && self.gate() < self.t_end) {
            return bad(format!("settings must engage inside [0, t_end), got {}", self.gate()));
        }
        let axis = self.grid.axis();
        check_resolution(self.k_a, &axis, "k_a")?;
        check_resolution(self.k_b, &axis, "k_b")?;
        check_dispersion(self.k_a.abs().max(self.k_b.abs()), self.mass, self.dt, "momenta")
    }

    fn potentials(&self, s: Settings) -> Vec<ExternalPotential> {
        let mk = |on: bool, center: f64| {
            let p = ExternalPotential::with_charge(1.0);
            if on {
                p.push(Barrier { center, ..self.barrier }.term())
            } else {
                p
            }
        };
        vec![mk(s.a, -self.barrier.center), mk(s.b, self.barrier.center)]
    }
}

/// Initial two-particle state on the square configuration grid.
pub fn epr_state(p: &EprParams, s: Settings) -> Result<WaveState, ScenarioError> {
    p.validate()?;
    let axis = p.grid.axis();
    let grid = GridSpec::new(vec![axis, axis], p.dt)?;
    let pk = |x0: f64, k: f64| Packet { x0, k0: k, sigma: p.sigma };
    let (l, r) = (-p.separation, p.separation);
    let psi = ComplexScalarField::from_fn(grid, 0.0, |q| {
        let (x1, x2) = (q[0], q[1]);
        let a = pk(l, -p.k_a).eval(x1) * pk(r, p.k_a).eval(x2);
        let b = pk(l, -p.k_b).eval(x1) * pk(r, p.k_b).eval(x2);
        if p.entangled {
            a + b
        } else {
            (pk(l, -p.k_a).eval(x1) + pk(l, -p.k_b).eval(x1)) * (pk(r, p.k_a).eval(x2) + pk(r, p.k_b).eval(x2))
        }
    });
    let norm = psi.norm_squared().sqrt();
    let values: Vec<Complex64> = psi.values.iter().map(|v| v / norm).collect();
    let psi = ComplexScalarField { values, ..psi };
    let mut st = WaveState::new(psi, p.mass, p.potentials(s), Regime::Schrodinger)?;
    st.sponge = p.sponge.map(|sp| sp.sponge());
    Ok(st)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EprReport {
    pub seed: u64,
    pub n: usize,
    pub entangled: bool,
    pub settings_a: Settings,
    pub settings_b: Settings,
    /// Largest final-position change of a probe member when substeps are doubled.
    pub integration_tolerance: f64,
    pub max_dz1: f64,
    pub median_dz1: f64,
    /// Fraction of members with `|Δz1| > 100 × integration_tolerance`.
    pub fraction_dz1_resolved: f64,
    /// Two-sample KS distance between the particle-1 marginals of runs A and B.
    pub ks_marginal_z1: f64,
    pub ks_marginal_z2: f64,
    pub run_a: OutcomeStats,
    pub run_b: OutcomeStats,
}

/// Per-run outcome statistics. An outcome is +1 when the particle ends
/// beyond its apparatus, −1 otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeStats {
    pub mean_z1: f64,
    pub mean_z2: f64,
    pub p_plus_1: f64,
    pub p_plus_2: f64,
    pub correlation: f64,
    pub frozen: usize,
}

#[derive(Debug, Clone)]
pub struct EprRun {
    pub report: EprReport,
    pub initial: Vec<[f64; 2]>,
    pub final_a: Vec<[f64; 2]>,
    pub final_b: Vec<[f64; 2]>,
}

fn outcome_stats(p: &EprParams, q: &[[f64; 2]], frozen: usize) -> OutcomeStats {
    let n = q.len() as f64;
    let c = p.barrier.center;
    let o1 = |z: f64| if z < -c { 1.0 } else { -1.0 };
    let o2 = |z: f64| if z > c { 1.0 } else { -1.0 };
    OutcomeStats {
        mean_z1: q.iter().map(|v| v[0]).sum::<f64>() / n,
        mean_z2: q.iter().map(|v| v[1]).sum::<f64>() / n,
        p_plus_1: q.iter().filter(|v| o1(v[0]) > 0.0).count() as f64 / n,
        p_plus_2: q.iter().filter(|v| o2(v[1]) > 0.0).count() as f64 / n,
        correlation: q.iter().map(|v| o1(v[0]) * o2(v[1])).sum::<f64>() / n,
        frozen,
    }
}

fn check_separated(p: &EprParams, s: Settings) -> Result<(), ScenarioError> {
    let steps = (p.gate() / p.dt).round() as usize;
    let st = evolve(epr_state(p, s)?, steps)?;
    let grid = &st.psi.grid;
    let (mut leak, mut total) = (0.0, 0.0);
    for (i, v) in st.psi.values.iter().enumerate() {
        let q = grid.point(i);
        let r = v.norm_sqr();
        total += r;
        if q[0] > 0.0 || q[1] < 0.0 {
            leak += r;
        }
    }
    let leak = leak / total;
    if leak > SEPARATION_LEAK {
        return Err(ScenarioError::Config(format!(
            "packets are not separated when the settings engage at t = {}: {leak:.3e} of the norm is on the partner's side",
            p.gate()
        )));
    }
    Ok(())
}

/// A/B runs from an explicit ensemble: identical initial configurations,
/// settings `sa` in run A and `sb` in run B.
pub fn run_epr_with(
    p: &EprParams,
    sa: Settings,
    sb: Settings,
    initial: Vec<[f64; 2]>,
    seed: u64,
) -> Result<EprRun, ScenarioError> {
    check_separated(p, sa)?;
    check_separated(p, sb)?;
    let opts = TransportOptions { substeps: p.substeps, ..Default::default() };
    let ra = transport(epr_state(p, sa)?, initial.clone(), p.n_steps(), &opts)?;
    let rb = transport(epr_state(p, sb)?, initial.clone(), p.n_steps(), &opts)?;

    let probe: Vec<[f64; 2]> = initial.iter().take(p.tolerance_probe.max(1)).copied().collect();
    let fine = TransportOptions { substeps: 2 * p.substeps, ..Default::default() };
    let rf = transport(epr_state(p, sa)?, probe.clone(), p.n_steps(), &fine)?;
    let integration_tolerance = rf
        .positions
        .iter()
        .zip(&ra.positions)
        .zip(&rf.status)
        .filter(|(_, st)| st.is_active())
        .map(|((f, c), _)| (f[0] - c[0]).abs().max((f[1] - c[1]).abs()))
        .fold(0.0, f64::max);

    let both: Vec<usize> = (0..initial.len()).filter(|&k| ra.status[k].is_active() && rb.status[k].is_active()).collect();
    let mut dz: Vec<f64> = both.iter().map(|&k| (ra.positions[k][0] - rb.positions[k][0]).abs()).collect();
    dz.sort_by(f64::total_cmp);
    let max_dz1 = dz.last().copied().unwrap_or(f64::NAN);
    let median_dz1 = dz.get(dz.len() / 2).copied().unwrap_or(f64::NAN);
    let resolved = dz.iter().filter(|&&d| d > 100.0 * integration_tolerance).count();

    let col = |r: &[[f64; 2]], j: usize| -> Vec<f64> { both.iter().map(|&k| r[k][j]).collect() };
    let frozen = |st: &[crate::guidance::MemberStatus]| st.iter().filter(|s| !s.is_active()).count();
    let report = EprReport {
        seed,
        n: initial.len(),
        entangled: p.entangled,
        settings_a: sa,
        settings_b: sb,
        integration_tolerance,
        max_dz1,
        median_dz1,
        fraction_dz1_resolved: if dz.is_empty() { 0.0 } else { resolved as f64 / dz.len() as f64 },
        ks_marginal_z1: ks_two_sample(&col(&ra.positions, 0), &col(&rb.positions, 0)),
        ks_marginal_z2: ks_two_sample(&col(&ra.positions, 1), &col(&rb.positions, 1)),
        run_a: outcome_stats(p, &ra.positions, frozen(&ra.status)),
        run_b: outcome_stats(p, &rb.positions, frozen(&rb.status)),
    };
    Ok(EprRun { report, initial, final_a: ra.positions, final_b: rb.positions })
}

/// A/B audit: run B flips setting `b` relative to `base`. The ensemble is
/// drawn from the initial Born density with `seed`.
pub fn run_epr(p: &EprParams, base: Settings, seed: u64) -> Result<EprRun, ScenarioError> {
    let st = epr_state(p, base)?;
    let init = sample_born::<2>(&st, &EnsembleSpec { n: p.ensemble_n, seed, initial_time: 0.0 })?;
    run_epr_with(p, base, Settings { b: !base.b, ..base }, init, seed)
}
