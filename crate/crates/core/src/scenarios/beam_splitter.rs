use serde::{Deserialize, Serialize};

use super::{check_dispersion, check_resolution, Barrier, LineGrid, Packet, ScenarioError, SpongeSpec};
use crate::farfield::{field_map, FieldMap, MapWindow, Parts, WorldlineSource};
use crate::guidance::{
    integrate_many_body, sample_born, transport, EnsembleSpec, MemberStatus, Trajectory, TransportOptions,
};
use crate::numerics::stats::{ks_one_sample, GridCdf};
use crate::soliton::SolitonParams;
use crate::spacetime::{ComplexScalarField, GridSpec};
use crate::wave::{evolve, ExternalPotential, Regime, WaveState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapAxis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

/// Far-field map along one reflected trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMapSpec {
    pub g0: f64,
    pub l0: f64,
    pub t: MapAxis,
    pub x: MapAxis,
}

/// One particle of mass `mass` scattering off a Gaussian barrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSplitterParams {
    pub mass: f64,
    pub grid: LineGrid,
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub packet: Packet,
    pub barrier: Barrier,
    #[serde(default)]
    pub sponge: Option<SpongeSpec>,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    pub ensemble_n: usize,
    #[serde(default)]
    pub field_map: Option<FieldMapSpec>,
}

/// Final positions closer than this are not ordered.
const ORDER_RESOLUTION: f64 = 1e-9;

fn default_substeps() -> usize {
    4
}

impl BeamSplitterParams {
    /// The reference setup: a slow heavy packet (`v = 0.1`) on a narrow barrier.
    pub fn reference() -> Self {
        Self {
            mass: 20.0,
            grid: LineGrid { min: -50.0, max: 50.0, n: 2048, periodic: true },
            dt: 0.1,
            t_start: 0.0,
            t_end: 240.0,
            packet: Packet { x0: -12.0, k0: 2.0, sigma: 2.0 },
            barrier: Barrier { center: 0.0, width: 0.1, amplitude: 0.0, on: None },
            sponge: Some(SpongeSpec { width: 8.0, strength: 0.5 }),
            substeps: 4,
            ensemble_n: 10_000,
            field_map: None,
        }
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Config(m));
        if !(self.mass > 0.0) {
            return bad(format!("mass must be positive, got {}", self.mass));
        }
        if !(self.dt > 0.0 && self.t_end > self.t_start) {
            return bad(format!("need dt > 0 and t_end > t_start, got dt={}, [{}, {}]", self.dt, self.t_start, self.t_end));
        }
        if !(self.packet.sigma > 0.0 && self.barrier.width > 0.0) {
            return bad("packet sigma and barrier width must be positive".into());
        }
        if self.substeps == 0 {
            return bad("substeps must be positive".into());
        }
        if let Some(fm) = &self.field_map {
            for (name, a) in [("t", fm.t), ("x", fm.x)] {
                if !(a.n >= 8 && a.max > a.min) {
                    return bad(format!("field_map.{name}: need n >= 8 and max > min, got {a:?}"));
                }
            }
        }
        check_resolution(self.packet.k0, &self.grid.axis(), "packet")?;
        check_dispersion(self.packet.k0, self.mass, self.dt, "packet")
    }
}

/// Initial state at `t_start` with the barrier set to `amplitude`.
pub fn beam_splitter_state(p: &BeamSplitterParams, amplitude: f64) -> Result<WaveState, ScenarioError> {
    p.validate()?;
    let grid = GridSpec::new(vec![p.grid.axis()], p.dt)?;
    let psi = ComplexScalarField::from_fn(grid, p.t_start, |x| p.packet.eval(x[0]));
    let barrier = Barrier { amplitude, ..p.barrier };
    let pot = ExternalPotential::with_charge(1.0).push(barrier.term());
    let mut s = WaveState::new(psi, p.mass, vec![pot], Regime::Schrodinger)?;
    s.sponge = p.sponge.map(|sp| sp.sponge());
    Ok(s)
}

fn transmitted_share(state: &WaveState, center: f64) -> f64 {
    let (mut right, mut total) = (0.0, 0.0);
    let axis = state.psi.grid.axis(0);
    for (i, v) in state.psi.values.iter().enumerate() {
        let r = v.norm_sqr();
        total += r;
        if axis.coord(i) > center {
            right += r;
        }
    }
    right / total
}

/// Wave-only transmission `∫_{x > center}|Ψ(t_end)|²` relative to the
/// remaining norm.
pub fn transmission(p: &BeamSplitterParams, amplitude: f64) -> Result<f64, ScenarioError> {
    let s = evolve(beam_splitter_state(p, amplitude)?, p.n_steps())?;
    Ok(transmitted_share(&s, p.barrier.center))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult {
    pub amplitude: f64,
    pub transmission: f64,
    pub target: f64,
    pub tolerance: f64,
    /// Every `(amplitude, T)` evaluated, in order.
    pub scan: Vec<(f64, f64)>,
}

/// Bisection on the barrier amplitude until the wave transmission is
/// within `tol/4` of `target`.
pub fn tune_barrier(p: &BeamSplitterParams, target: f64, tol: f64) -> Result<TuneResult, ScenarioError> {
    let mut scan = Vec::new();
    let eval = |a: f64, scan: &mut Vec<(f64, f64)>| -> Result<f64, ScenarioError> {
        let t = transmission(p, a)?;
        scan.push((a, t));
        Ok(t)
    };
    let t0 = eval(0.0, &mut scan)?;
    if !(t0 > target) {
        return Err(ScenarioError::NoBracket { target, scan });
    }
    // Kinetic energy sets the natural amplitude scale.
    let mut hi = 0.25 * p.packet.k0 * p.packet.k0 / (2.0 * p.mass);
    let mut lo = 0.0;
    let mut t_hi = eval(hi, &mut scan)?;
    let mut expansions = 0;
    while t_hi > target {
        lo = hi;
        hi *= 2.0;
        t_hi = eval(hi, &mut scan)?;
        expansions += 1;
        if expansions > 40 {
            return Err(ScenarioError::NoBracket { target, scan });
        }
    }
    if (t_hi - target).abs() <= 0.25 * tol {
        return Ok(TuneResult { amplitude: hi, transmission: t_hi, target, tolerance: tol, scan });
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let t = eval(mid, &mut scan)?;
        if (t - target).abs() <= 0.25 * tol {
            return Ok(TuneResult { amplitude: mid, transmission: t, target, tolerance: tol, scan });
        }
        if t > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(ScenarioError::NoBracket { target, scan })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamSplitterReport {
    pub barrier_amplitude: f64,
    pub seed: u64,
    pub n: usize,
    pub reflected: usize,
    pub transmitted: usize,
    /// Frozen members or members still inside the barrier region at `t_end`.
    pub unclassified: usize,
    /// `reflected / (reflected + transmitted)`.
    pub reflected_fraction: f64,
    pub wave_transmission: f64,
    /// KS distance of the final ensemble to `|Ψ(t_end)|²`.
    pub ks_final: f64,
    /// Members frozen at a node or at the grid edge.
    pub frozen: usize,
    /// Adjacent active pairs (in initial order) whose final order is
    /// reversed by more than the ordering resolution.
    pub crossing_pairs: usize,
    /// Adjacent active pairs ending within the ordering resolution.
    pub merged_pairs: usize,
    /// Transmission is decided by a single threshold in initial position.
    pub threshold_monotone: bool,
    pub selected_initial_position: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BeamSplitterRun {
    pub report: BeamSplitterReport,
    pub final_state: WaveState,
    pub initial_positions: Vec<f64>,
    pub final_positions: Vec<f64>,
    pub final_status: Vec<MemberStatus>,
    /// Lab-time trajectory of the selected reflected member.
    pub selected: Option<Trajectory>,
    pub field_map: Option<FieldMap>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Reflected,
    Transmitted,
    Unclassified,
}

pub fn run_beam_splitter(p: &BeamSplitterParams, amplitude: f64, seed: u64) -> Result<BeamSplitterRun, ScenarioError> {
    let state = beam_splitter_state(p, amplitude)?;
    let init = sample_born::<1>(&state, &EnsembleSpec { n: p.ensemble_n, seed, initial_time: p.t_start })?;
    let opts = TransportOptions { substeps: p.substeps, ..Default::default() };
    let res = transport(state.clone(), init.clone(), p.n_steps(), &opts)?;

    let band = 3.0 * p.barrier.width;
    let c = p.barrier.center;
    let sides: Vec<Side> = res
        .positions
        .iter()
        .zip(&res.status)
        .map(|(q, st)| {
            if !st.is_active() {
                Side::Unclassified
            } else if q[0] > c + band {
                Side::Transmitted
            } else if q[0] < c - band {
                Side::Reflected
            } else {
                Side::Unclassified
            }
        })
        .collect();
    let count = |s: Side| sides.iter().filter(|v| **v == s).count();
    let (reflected, transmitted, unclassified) = (count(Side::Reflected), count(Side::Transmitted), count(Side::Unclassified));

    let rho = res.state.psi.density().values;
    let cdf = GridCdf::new(*res.state.psi.grid.axis(0), &rho).ok_or(crate::guidance::GuidanceError::ZeroNorm)?;
    let finals: Vec<f64> = res.positions.iter().map(|q| q[0]).collect();
    let ks_final = ks_one_sample(&finals, |x| cdf.cdf(x));

    let mut order: Vec<usize> = (0..init.len()).collect();
    order.sort_by(|&a, &b| init[a][0].total_cmp(&init[b][0]));
    // Frozen members stop where they froze, so only active ones can be ordered.
    let active: Vec<usize> = order.iter().copied().filter(|&k| res.status[k].is_active()).collect();
    // Neighbours squeezed together by the flow can end closer than rounding
    // allows to order them; those count as merged, not crossed.
    let gap = |w: &[usize]| finals[w[1]] - finals[w[0]];
    let crossing_pairs = active.windows(2).filter(|w| gap(w) < -ORDER_RESOLUTION).count();
    let merged_pairs = active.windows(2).filter(|w| gap(w).abs() <= ORDER_RESOLUTION).count();
    // Sorted by initial position: reflected members first, then transmitted.
    let classified: Vec<Side> = order.iter().map(|&k| sides[k]).filter(|s| *s != Side::Unclassified).collect();
    let switches = classified.windows(2).filter(|w| w[0] != w[1]).count();
    let threshold_monotone = switches == 0 || (switches == 1 && classified[0] == Side::Reflected);

    let reflected_sorted: Vec<usize> = order.iter().copied().filter(|&k| sides[k] == Side::Reflected).collect();
    let selected_idx = reflected_sorted.get(reflected_sorted.len() / 2).copied();
    let (selected, map) = match (selected_idx, p.field_map) {
        (Some(k), spec) => {
            let (trs, _) = integrate_many_body(state.clone(), init[k], p.n_steps(), p.substeps)?;
            let tr = trs.into_iter().next().unwrap();
            let map = match spec {
                Some(fm) => {
                    let params = SolitonParams::new(fm.g0, fm.l0, p.mass)
                        .map_err(|e| ScenarioError::Config(format!("field_map: {e}")))?;
                    let src = WorldlineSource::from_nonrelativistic(tr.clone(), params, ExternalPotential::free())?;
                    let w = MapWindow::t_x((fm.t.min, fm.t.max, fm.t.n), (fm.x.min, fm.x.max, fm.x.n));
                    Some(field_map(std::slice::from_ref(&src), &w, Parts::ALL)?)
                }
                None => None,
            };
            (Some(tr), map)
        }
        (None, _) => (None, None),
    };

    let classified_n = reflected + transmitted;
    let report = BeamSplitterReport {
        barrier_amplitude: amplitude,
        seed,
        n: init.len(),
        reflected,
        transmitted,
        unclassified,
        reflected_fraction: if classified_n > 0 { reflected as f64 / classified_n as f64 } else { f64::NAN },
        wave_transmission: transmitted_share(&res.state, c),
        ks_final,
        frozen: init.len() - active.len(),
        crossing_pairs,
        merged_pairs,
        threshold_monotone,
        selected_initial_position: selected_idx.map(|k| init[k][0]),
    };
    Ok(BeamSplitterRun {
        report,
        final_state: res.state,
        initial_positions: init.iter().map(|q| q[0]).collect(),
        final_positions: finals,
        final_status: res.status,
        selected,
        field_map: map,
    })
}
