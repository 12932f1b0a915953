use num_complex::Complex64;
use rayon::prelude::*;

use super::trajectory::{TrajectorySample, TrajectoryStatus};
use super::{GuidanceError, Regime, Trajectory};
use crate::numerics::interp::stencil;
use crate::spacetime::{first_derivative, unwrap_near, FourVector, GridSpec, AMPLITUDE_FLOOR_REL};
use crate::wave::{Evolver, Regime as WaveRegime, WaveState};

/// Nonrelativistic guidance velocities `v_j = Im(Ψ̄∂_jΨ)/(m_j|Ψ|²)` on the
/// nodes of one configuration-space slice.
#[derive(Debug, Clone)]
pub struct VelocityGrid {
    grid: GridSpec,
    time: f64,
    v: Vec<[f64; 3]>,
    valid: Vec<bool>,
}

impl VelocityGrid {
    pub fn from_state(state: &WaveState) -> Result<Self, GuidanceError> {
        if state.regime != WaveRegime::Schrodinger {
            return Err(GuidanceError::InvalidParams("many-body guidance needs a schrodinger state".into()));
        }
        let grid = state.psi.grid.clone();
        let psi = &state.psi.values;
        let floor = AMPLITUDE_FLOOR_REL * state.psi.max_abs();
        let mut v = vec![[f64::NAN; 3]; grid.len()];
        let mut valid = vec![false; grid.len()];
        for i in 0..grid.len() {
            let p = psi[i];
            if !(p.norm() > floor) {
                continue;
            }
            valid[i] = true;
            for (j, vj) in v[i].iter_mut().enumerate().take(grid.dims()) {
                let d: Complex64 = first_derivative(psi, &grid, j, i);
                *vj = (p.conj() * d).im / (p.norm_sqr() * state.omega0);
            }
        }
        Ok(Self { grid, time: state.time(), v, valid })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Tensor-product cubic interpolation at configuration point `q`.
    pub fn eval(&self, q: &[f64]) -> Result<[f64; 3], GuidanceError> {
        let dims = self.grid.dims();
        let mut pt = [self.time, 0.0, 0.0, 0.0];
        pt[1..1 + q.len().min(3)].copy_from_slice(&q[..q.len().min(3)]);
        let mut st = [([0usize; 4], [0.0; 4]); 3];
        for (k, s) in st.iter_mut().enumerate().take(dims) {
            *s = stencil(self.grid.axis(k), q[k]).ok_or(GuidanceError::OutsideDomain(pt))?;
        }
        let mut out = [0.0; 3];
        let n_terms = 4usize.pow(dims as u32);
        for term in 0..n_terms {
            let mut idx = [0usize; 3];
            let mut w = 1.0;
            let mut t = term;
            for k in 0..dims {
                let o = t % 4;
                t /= 4;
                idx[k] = st[k].0[o];
                w *= st[k].1[o];
            }
            let flat = self.grid.flat_index(&idx[..dims]);
            if !self.valid[flat] {
                return Err(GuidanceError::Masked(pt));
            }
            for (o, vv) in out.iter_mut().zip(&self.v[flat]).take(dims) {
                *o += w * vv;
            }
        }
        Ok(out)
    }
}

/// Complex value of Ψ at `q` by cubic interpolation.
fn psi_at(state: &WaveState, q: &[f64]) -> Option<Complex64> {
    let grid = &state.psi.grid;
    let dims = grid.dims();
    let mut st = [([0usize; 4], [0.0; 4]); 3];
    for (k, s) in st.iter_mut().enumerate().take(dims) {
        *s = stencil(grid.axis(k), q[k])?;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for term in 0..4usize.pow(dims as u32) {
        let mut idx = [0usize; 3];
        let mut w = 1.0;
        let mut t = term;
        for k in 0..dims {
            let o = t % 4;
            t /= 4;
            idx[k] = st[k].0[o];
            w *= st[k].1[o];
        }
        acc += state.psi.values[grid.flat_index(&idx[..dims])] * w;
    }
    Some(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemberStatus {
    Active,
    /// Entered a node region at time `t` and was frozen there.
    Masked { t: f64 },
    /// Left the grid at time `t`.
    Outside { t: f64 },
}

impl MemberStatus {
    pub fn is_active(&self) -> bool {
        matches!(self, MemberStatus::Active)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportOptions {
    /// RK4 substeps per wave step.
    pub substeps: usize,
    /// Record positions every this many wave steps; 0 disables recording.
    pub record_every: usize,
    /// Number of leading members whose positions are recorded.
    pub record_members: usize,
    /// Also record the unwrapped phase of Ψ along recorded members.
    pub record_phase: bool,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self { substeps: 4, record_every: 0, record_members: 0, record_phase: false }
    }
}

/// Snapshot of the recorded members.
#[derive(Debug, Clone, PartialEq)]
pub struct Record<const D: usize> {
    pub t: f64,
    pub positions: Vec<[f64; D]>,
    pub velocities: Vec<[f64; D]>,
    pub phases: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TransportResult<const D: usize> {
    pub state: WaveState,
    pub positions: Vec<[f64; D]>,
    pub status: Vec<MemberStatus>,
    pub records: Vec<Record<D>>,
}

fn velocity_between<const D: usize>(
    a: &VelocityGrid,
    b: &VelocityGrid,
    q: &[f64; D],
    t: f64,
) -> Result<[f64; D], GuidanceError> {
    let u = ((t - a.time) / (b.time - a.time)).clamp(0.0, 1.0);
    let va = a.eval(q)?;
    let vb = b.eval(q)?;
    let mut out = [0.0; D];
    for k in 0..D {
        out[k] = (1.0 - u) * va[k] + u * vb[k];
    }
    Ok(out)
}

fn rk4_window<const D: usize>(
    a: &VelocityGrid,
    b: &VelocityGrid,
    q: &mut [f64; D],
    substeps: usize,
) -> Result<(), GuidanceError> {
    let h = (b.time - a.time) / substeps as f64;
    let add = |q: &[f64; D], k: &[f64; D], c: f64| {
        let mut o = *q;
        for i in 0..D {
            o[i] += c * k[i];
        }
        o
    };
    for j in 0..substeps {
        let t = a.time + j as f64 * h;
        let k1 = velocity_between(a, b, q, t)?;
        let k2 = velocity_between(a, b, &add(q, &k1, 0.5 * h), t + 0.5 * h)?;
        let k3 = velocity_between(a, b, &add(q, &k2, 0.5 * h), t + 0.5 * h)?;
        let k4 = velocity_between(a, b, &add(q, &k3, h), t + h)?;
        for i in 0..D {
            q[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(())
}

fn record<const D: usize>(
    state: &WaveState,
    vg: &VelocityGrid,
    positions: &[[f64; D]],
    opts: &TransportOptions,
    last_phase: Option<&[f64]>,
) -> Record<D> {
    let m = opts.record_members.min(positions.len());
    let pos = positions[..m].to_vec();
    let velocities = pos
        .iter()
        .map(|q| {
            let v = vg.eval(q).unwrap_or([f64::NAN; 3]);
            let mut o = [0.0; D];
            o.copy_from_slice(&v[..D]);
            o
        })
        .collect();
    let phases = if opts.record_phase {
        pos.iter()
            .enumerate()
            .map(|(k, q)| {
                let raw = psi_at(state, q).map(|p| p.arg()).unwrap_or(f64::NAN);
                match last_phase {
                    Some(prev) if prev[k].is_finite() && raw.is_finite() => unwrap_near(raw, prev[k]),
                    _ => raw,
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    Record { t: state.time(), positions: pos, velocities, phases }
}

/// Co-evolves a Schrödinger state for `n_steps` and an ensemble of
/// configuration points guided by it. Members are advanced with RK4
/// substeps on velocities interpolated linearly in time between slices.
pub fn transport<const D: usize>(
    state: WaveState,
    initial: Vec<[f64; D]>,
    n_steps: usize,
    opts: &TransportOptions,
) -> Result<TransportResult<D>, GuidanceError> {
    if state.psi.grid.dims() != D {
        return Err(GuidanceError::Dimension(format!("state has {} axes, members have {D}", state.psi.grid.dims())));
    }
    if opts.substeps == 0 {
        return Err(GuidanceError::InvalidParams("substeps must be positive".into()));
    }
    let mut state = state;
    let mut evolver = Evolver::new(&state)?;
    let mut vg = VelocityGrid::from_state(&state)?;
    let mut positions = initial;
    let mut status = vec![MemberStatus::Active; positions.len()];
    for (q, st) in positions.iter().zip(status.iter_mut()) {
        match vg.eval(q) {
            Ok(_) => {}
            Err(GuidanceError::Masked(_)) => *st = MemberStatus::Masked { t: state.time() },
            Err(_) => *st = MemberStatus::Outside { t: state.time() },
        }
    }
    let mut records = Vec::new();
    if opts.record_every > 0 {
        records.push(record(&state, &vg, &positions, opts, None));
    }
    for step in 1..=n_steps {
        evolver.step(&mut state)?;
        if !state.psi.is_finite() {
            return Err(crate::wave::WaveError::NonFinite { step, time: state.time() }.into());
        }
        let next = VelocityGrid::from_state(&state)?;
        let t_end = next.time;
        positions.par_iter_mut().zip(status.par_iter_mut()).for_each(|(q, st)| {
            if !st.is_active() {
                return;
            }
            let mut trial = *q;
            match rk4_window(&vg, &next, &mut trial, opts.substeps) {
                Ok(()) => *q = trial,
                Err(GuidanceError::Masked(_)) => *st = MemberStatus::Masked { t: t_end },
                Err(_) => *st = MemberStatus::Outside { t: t_end },
            }
        });
        vg = next;
        if opts.record_every > 0 && step % opts.record_every == 0 {
            let last = records.last().map(|r: &Record<D>| r.phases.clone());
            records.push(record(&state, &vg, &positions, opts, last.as_deref()));
        }
    }
    Ok(TransportResult { state, positions, status, records })
}

/// Lab-time trajectories of the particles of one configuration point,
/// one per configuration axis, sampled every wave step.
pub fn integrate_many_body<const D: usize>(
    state: WaveState,
    q0: [f64; D],
    n_steps: usize,
    substeps: usize,
) -> Result<(Vec<Trajectory>, WaveState), GuidanceError> {
    let opts = TransportOptions { substeps, record_every: 1, record_members: 1, record_phase: true };
    let mass = state.omega0;
    let res = transport(state, vec![q0], n_steps, &opts)?;
    let status = match res.status[0] {
        MemberStatus::Active => TrajectoryStatus::Completed,
        MemberStatus::Masked { t } => TrajectoryStatus::EnteredNode { lambda: t },
        MemberStatus::Outside { t } => TrajectoryStatus::ExitedDomain { lambda: t },
    };
    let trajectories = (0..D)
        .map(|j| {
            let samples = res
                .records
                .iter()
                .take_while(|r| r.velocities[0][j].is_finite())
                .map(|r| TrajectorySample {
                    lambda: r.t,
                    z: FourVector::new(r.t, r.positions[0][j], 0.0, 0.0),
                    dz: FourVector::new(1.0, r.velocities[0][j], 0.0, 0.0),
                    mass_squared: mass * mass,
                    regime: Regime::Subluminal,
                    action: r.phases[0],
                })
                .collect();
            Trajectory::from_lab_time(samples, status)
        })
        .collect();
    Ok((trajectories, res.state))
}
