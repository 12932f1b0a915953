use std::io::Write;

use super::velocity::initial_orientation;
use super::{classify, velocity, GuidanceError, GuidingField, Regime};
use crate::numerics::interp::hermite;
use crate::numerics::ode::{integrate, DenseStep, OdeError, Tolerances};
use crate::numerics::roots::brent;
use crate::output::RunMeta;
use crate::spacetime::FourVector;

/// Integration state: `(t, x, y, z, λ, S)`.
pub(crate) type NodeState = [f64; 6];

/// Accepted integrator node in the natural parameter σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub sigma: f64,
    pub y: NodeState,
    pub dy: NodeState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub lambda: f64,
    pub z: FourVector,
    /// `dz/dλ`; unbounded near critical points.
    pub dz: FourVector,
    /// Kinematic `p·p` at the sample.
    pub mass_squared: f64,
    pub regime: Regime,
    /// Phase of the guiding wave accumulated along the path.
    pub action: f64,
}

/// A crossing of `M² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalEvent {
    pub lambda: f64,
    pub z: FourVector,
    pub mass_squared: f64,
    pub from: Regime,
    pub to: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryStatus {
    Completed,
    ExitedDomain { lambda: f64 },
    EnteredNode { lambda: f64 },
    StepCollapse { lambda: f64 },
    StepLimit { lambda: f64 },
}

impl TrajectoryStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, TrajectoryStatus::Completed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    /// Parameterized by proper length `λ`.
    Relativistic,
    /// Parameterized by lab time, `λ = t`.
    Nonrelativistic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub samples: Vec<TrajectorySample>,
    pub events: Vec<CriticalEvent>,
    pub status: TrajectoryStatus,
    /// Orientation sign `s`, fixed at the start.
    pub orientation: f64,
    /// The start point was already tachyonic, so the orientation is a convention.
    pub began_tachyonic: bool,
    nodes: Vec<Node>,
}

/// Interpolated point on a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub lambda: f64,
    pub z: FourVector,
    /// `dz/dσ`; parallel to `dz/dλ` with a bounded norm.
    pub tangent: FourVector,
    pub action: f64,
}

impl Trajectory {
    /// Builds a lab-time trajectory from samples at increasing `t`.
    pub(crate) fn from_lab_time(samples: Vec<TrajectorySample>, status: TrajectoryStatus) -> Self {
        let n = samples.len();
        // The action slope is not sampled; use differences of the samples.
        let slope = |k: usize| -> f64 {
            if n < 2 {
                return 0.0;
            }
            let (i, j) = (k.saturating_sub(1), (k + 1).min(n - 1));
            (samples[j].action - samples[i].action) / (samples[j].lambda - samples[i].lambda)
        };
        let nodes = samples
            .iter()
            .enumerate()
            .map(|(k, s)| Node {
                sigma: s.lambda,
                y: [s.z.t, s.z.x, s.z.y, s.z.z, s.lambda, s.action],
                dy: [s.dz.t, s.dz.x, s.dz.y, s.dz.z, 1.0, slope(k)],
            })
            .collect();
        Self {
            kind: TrajectoryKind::Nonrelativistic,
            samples,
            events: Vec::new(),
            status,
            orientation: 1.0,
            began_tachyonic: false,
            nodes,
        }
    }

    /// The worldline reflected through `t = 0`, reparameterized by `−λ` so
    /// that `λ` still increases along it.
    pub fn time_reflected(&self) -> Trajectory {
        let nodes = self
            .nodes
            .iter()
            .rev()
            .map(|n| Node {
                sigma: -n.sigma,
                y: [-n.y[0], n.y[1], n.y[2], n.y[3], -n.y[4], n.y[5]],
                dy: [n.dy[0], -n.dy[1], -n.dy[2], -n.dy[3], n.dy[4], -n.dy[5]],
            })
            .collect();
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|s| TrajectorySample {
                lambda: -s.lambda,
                z: FourVector::new(-s.z.t, s.z.x, s.z.y, s.z.z),
                dz: FourVector::new(s.dz.t, -s.dz.x, -s.dz.y, -s.dz.z),
                ..*s
            })
            .collect();
        let events = self
            .events
            .iter()
            .rev()
            .map(|e| CriticalEvent {
                lambda: -e.lambda,
                z: FourVector::new(-e.z.t, e.z.x, e.z.y, e.z.z),
                from: e.to,
                to: e.from,
                ..*e
            })
            .collect();
        Trajectory { samples, events, nodes, ..self.clone() }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn lambda_range(&self) -> Option<(f64, f64)> {
        Some((self.nodes.first()?.y[4], self.nodes.last()?.y[4]))
    }

    fn point_in(&self, k: usize, sigma: f64) -> TrajectoryPoint {
        let (a, b) = (&self.nodes[k], &self.nodes[k + 1]);
        let h = b.sigma - a.sigma;
        let s = sigma - a.sigma;
        let mut v = [0.0; 6];
        let mut d = [0.0; 6];
        for c in 0..6 {
            (v[c], d[c]) = hermite(a.y[c], a.dy[c], b.y[c], b.dy[c], h, s);
        }
        TrajectoryPoint {
            lambda: v[4],
            z: FourVector::new(v[0], v[1], v[2], v[3]),
            tangent: FourVector::new(d[0], d[1], d[2], d[3]),
            action: v[5],
        }
    }

    /// Hermite interpolation at parameter `λ` between integrator nodes.
    pub fn at_lambda(&self, lambda: f64) -> Option<TrajectoryPoint> {
        let (l0, l1) = self.lambda_range()?;
        if !(lambda >= l0 && lambda <= l1) {
            return None;
        }
        // First node with y[4] ≥ λ.
        let j = self.nodes.partition_point(|n| n.y[4] < lambda).max(1).min(self.nodes.len() - 1);
        let k = j - 1;
        let (a, b) = (&self.nodes[k], &self.nodes[k + 1]);
        if b.y[4] <= a.y[4] {
            return Some(self.point_in(k, a.sigma));
        }
        let sigma = brent(|s| self.point_in(k, s).lambda - lambda, a.sigma, b.sigma, 1e-15 * b.sigma.abs().max(1.0))
            .unwrap_or(if lambda - a.y[4] < b.y[4] - lambda { a.sigma } else { b.sigma });
        let mut p = self.point_in(k, sigma);
        p.lambda = lambda;
        Some(p)
    }

    /// All roots in σ of `g(σ)` over the node segments, as interpolated points.
    pub(crate) fn roots_of(&self, g: impl Fn(&TrajectoryPoint) -> f64) -> Vec<TrajectoryPoint> {
        self.roots_split(g, None::<fn(&TrajectoryPoint) -> f64>)
    }

    /// Like [`Self::roots_of`], but each subinterval is also split at sign
    /// changes of `split`, typically the derivative of `g`, so that a pair
    /// of close roots around an extremum is not missed.
    pub(crate) fn roots_split(
        &self,
        g: impl Fn(&TrajectoryPoint) -> f64,
        split: Option<impl Fn(&TrajectoryPoint) -> f64>,
    ) -> Vec<TrajectoryPoint> {
        let mut out = Vec::new();
        for k in 0..self.nodes.len().saturating_sub(1) {
            // Subdivide each segment so curved pieces are not missed.
            const SUB: usize = 4;
            let (sa, sb) = (self.nodes[k].sigma, self.nodes[k + 1].sigma);
            let tol = |s: f64| 1e-15 * s.abs().max(1.0);
            let gs = |q: f64| g(&self.point_in(k, q));
            let bracket = |a: f64, b: f64, ga: f64, gb: f64, out: &mut Vec<TrajectoryPoint>| {
                if ga == 0.0 {
                    out.push(self.point_in(k, a));
                } else if ga * gb < 0.0 {
                    if let Ok(r) = brent(gs, a, b, tol(b)) {
                        out.push(self.point_in(k, r));
                    }
                }
            };
            let mut prev_s = sa;
            let mut prev_g = gs(sa);
            for j in 1..=SUB {
                let s = sa + (sb - sa) * j as f64 / SUB as f64;
                let gv = gs(s);
                let mid = split.as_ref().and_then(|h| {
                    let hs = |q: f64| h(&self.point_in(k, q));
                    let (ha, hb) = (hs(prev_s), hs(s));
                    if ha * hb < 0.0 {
                        brent(hs, prev_s, s, tol(s)).ok()
                    } else {
                        None
                    }
                });
                match mid {
                    Some(m) => {
                        let gm = gs(m);
                        bracket(prev_s, m, prev_g, gm, &mut out);
                        bracket(m, s, gm, gv, &mut out);
                    }
                    None => bracket(prev_s, s, prev_g, gv, &mut out),
                }
                prev_s = s;
                prev_g = gv;
            }
            if k + 2 == self.nodes.len() && prev_g == 0.0 {
                out.push(self.point_in(k, sb));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOptions {
    /// Output stride in `λ`.
    pub stride: f64,
    pub tol: Tolerances,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self { stride: 0.05, tol: Tolerances { rtol: 1e-11, atol: 1e-12, h_init: 1e-3, ..Default::default() } }
    }
}

fn status_from(err: &GuidanceError, lambda: f64) -> TrajectoryStatus {
    match err {
        GuidanceError::Masked(_) => TrajectoryStatus::EnteredNode { lambda },
        _ => TrajectoryStatus::ExitedDomain { lambda },
    }
}

/// Integrates a relativistic trajectory from `z0` over `λ ∈ [λ0, λ1]`.
///
/// Samples are emitted every `opts.stride` in `λ`; sign changes of `M²`
/// are located on the dense output and recorded as events. The run
/// stops early with a non-`Completed` status when the field cannot be
/// evaluated along the path.
pub fn integrate_trajectory(
    field: &impl GuidingField,
    z0: FourVector,
    lambda_span: (f64, f64),
    opts: &TrajectoryOptions,
) -> Result<Trajectory, GuidanceError> {
    let (l0, l1) = lambda_span;
    if !(l1 > l0) || !(opts.stride > 0.0) {
        return Err(GuidanceError::InvalidParams("need λ1 > λ0 and a positive stride".into()));
    }
    let w0 = field.omega0();
    let start = field.local(z0)?;
    let s = initial_orientation(start.momentum);
    let began_tachyonic = classify(start.momentum.square(), w0) == Regime::Tachyonic;

    let rhs = |_: f64, y: &NodeState| -> Result<NodeState, GuidanceError> {
        let z = FourVector::new(y[0], y[1], y[2], y[3]);
        let local = field.local(z)?;
        let p = local.momentum;
        let dz = p.dual() * (-s / w0);
        let ea = field.potential().e_four_potential(z).dual();
        let grad_s = p - ea;
        let ds = grad_s.t * dz.t + grad_s.x * dz.x + grad_s.y * dz.y + grad_s.z * dz.z;
        Ok([dz.t, dz.x, dz.y, dz.z, p.square().abs().sqrt() / w0, ds])
    };
    let y0: NodeState = [z0.t, z0.x, z0.y, z0.z, l0, start.phase.unwrap_or(0.0)];
    let f0 = rhs(0.0, &y0)?;
    let mut nodes = vec![Node { sigma: 0.0, y: y0, dy: f0 }];
    let mut samples = Vec::new();
    let mut events = Vec::new();
    let n_samples = ((l1 - l0) / opts.stride + 1e-9).floor() as usize;
    let target = |k: usize| l0 + k as f64 * opts.stride;
    let mut next_k = 0usize;
    let mut failure: Option<GuidanceError> = None;

    let emit = |y: &NodeState, lambda: f64, samples: &mut Vec<TrajectorySample>| -> Result<(), GuidanceError> {
        let z = FourVector::new(y[0], y[1], y[2], y[3]);
        let v = velocity(field, z, Some(s))?;
        samples.push(TrajectorySample { lambda, z, dz: v.dz, mass_squared: v.mass_squared, regime: v.regime, action: y[5] });
        Ok(())
    };
    emit(&y0, l0, &mut samples)?;
    next_k += 1;

    let m2_of = |dy: &NodeState| w0 * w0 * (dy[0] * dy[0] - dy[1] * dy[1] - dy[2] * dy[2] - dy[3] * dy[3]);
    let mut m2_prev = m2_of(&f0);

    let mut tol = opts.tol;
    tol.h_max = tol.h_max.min(opts.stride * w0.max(1.0));
    let sigma_max = 1e3 * (l1 - l0) + 1e3 / w0;
    let visit = |d: &DenseStep<6>| -> bool {
        nodes.push(Node { sigma: d.s1(), y: d.y1, dy: d.f1 });
        let m2_new = m2_of(&d.f1);
        if m2_prev * m2_new < 0.0 || (m2_new == 0.0 && m2_prev != 0.0) {
            let m2_at = |th: f64| {
                let y = d.eval(th);
                field.local(FourVector::new(y[0], y[1], y[2], y[3])).map(|l| l.momentum.square()).unwrap_or(f64::NAN)
            };
            if let Ok(th) = brent(m2_at, 0.0, 1.0, 1e-15) {
                let y = d.eval(th);
                events.push(CriticalEvent {
                    lambda: y[4],
                    z: FourVector::new(y[0], y[1], y[2], y[3]),
                    mass_squared: m2_at(th),
                    from: classify(m2_prev, w0),
                    to: classify(m2_new, w0),
                });
            }
        }
        m2_prev = m2_new;
        let (la, lb) = (d.y0[4], d.y1[4]);
        while next_k <= n_samples && target(next_k) <= lb {
            let lt = target(next_k);
            let th = if lb > la { brent(|th| d.eval(th)[4] - lt, 0.0, 1.0, 1e-15).unwrap_or(1.0) } else { 1.0 };
            if let Err(e) = emit(&d.eval(th), lt, &mut samples) {
                failure = Some(e);
                return false;
            }
            next_k += 1;
        }
        next_k <= n_samples
    };
    let result = integrate(rhs, 0.0, y0, sigma_max, &tol, visit);
    let last_lambda = nodes.last().map(|n| n.y[4]).unwrap_or(l0);
    let status = match (result, failure) {
        (_, Some(e)) => status_from(&e, last_lambda),
        (Ok(_), None) if next_k > n_samples => TrajectoryStatus::Completed,
        (Ok(_), None) => TrajectoryStatus::StepLimit { lambda: last_lambda },
        (Err(OdeError::Rhs(e)), None) => status_from(&e, last_lambda),
        (Err(OdeError::StepCollapse { .. }), None) => TrajectoryStatus::StepCollapse { lambda: last_lambda },
        (Err(OdeError::TooManySteps { .. }), None) => TrajectoryStatus::StepLimit { lambda: last_lambda },
    };
    Ok(Trajectory { kind: TrajectoryKind::Relativistic, samples, events, status, orientation: s, began_tachyonic, nodes })
}

/// Writes the stride samples as CSV with a metadata header line.
pub fn write_trajectory_csv(w: &mut impl Write, traj: &Trajectory, meta: &RunMeta) -> std::io::Result<()> {
    writeln!(w, "{}", meta.header_line())?;
    writeln!(w, "lambda,t,x,y,z,dt_dlambda,dx_dlambda,dy_dlambda,dz_dlambda,mass_squared,regime")?;
    for s in &traj.samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            s.lambda,
            s.z.t,
            s.z.x,
            s.z.y,
            s.z.z,
            s.dz.t,
            s.dz.x,
            s.dz.y,
            s.dz.z,
            s.mass_squared,
            s.regime.as_str()
        )?;
    }
    Ok(())
}
