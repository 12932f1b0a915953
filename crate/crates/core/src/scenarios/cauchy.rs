use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::beam_splitter::MapAxis;
use super::{beam_splitter_state, BeamSplitterParams, ScenarioError};
use crate::farfield::{field_map, write_field_map, FieldMap, MapWindow, Parts, WorldlineSource};
use crate::guidance::{integrate_many_body, Trajectory};
use crate::output::RunMeta;
use crate::soliton::SolitonParams;
use crate::spacetime::{write_complex, ComplexScalarField};
use crate::wave::ExternalPotential;

/// Spatial window on the hyperplane `t = t_in`, `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub t_in: f64,
    pub x: MapAxis,
    pub y: MapAxis,
}

/// One worldline recorded under two values of the local setting.
///
/// The particle is the beam-splitter particle; its barrier switches on at
/// `particle.barrier.on`. Run A uses `amplitude_a`, run B `amplitude_b`.
/// Everything before the switch-on is shared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyParams {
    pub particle: BeamSplitterParams,
    pub amplitude_a: f64,
    pub amplitude_b: f64,
    /// Start of the recorded member; defaults to the packet centre.
    #[serde(default)]
    pub start: Option<f64>,
    pub g0: f64,
    pub l0: f64,
    pub surface: SurfaceSpec,
}

impl CauchyParams {
    /// The beam-splitter particle started early, with the barrier
    /// switched on at `t = 60` in run B only.
    pub fn reference() -> Self {
        let mut particle = BeamSplitterParams::reference();
        particle.t_start = -120.0;
        particle.t_end = 200.0;
        particle.packet.x0 = -24.0;
        particle.barrier.on = Some(60.0);
        particle.ensemble_n = 1;
        Self {
            particle,
            amplitude_a: 0.0,
            amplitude_b: 0.4,
            start: None,
            g0: 1.0,
            l0: 1e-4,
            surface: SurfaceSpec {
                t_in: 30.0,
                x: MapAxis { min: -100.0, max: 100.0, n: 101 },
                y: MapAxis { min: 0.0, max: 100.0, n: 51 },
            },
        }
    }

    pub fn gate(&self) -> Option<f64> {
        self.particle.barrier.on
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.particle.validate()?;
        let Some(gate) = self.gate() else {
            return Err(ScenarioError::Config("the setting needs a switch-on time (barrier.on)".into()));
        };
        let t_in = self.surface.t_in;
        if !(t_in < gate) {
            return Err(ScenarioError::Config(format!(
                "surface time t_in = {t_in} is not before the interaction onset at t = {gate}"
            )));
        }
        if !(t_in > self.particle.t_start && gate < self.particle.t_end) {
            return Err(ScenarioError::Config("surface time and switch-on must lie inside the run".into()));
        }
        if self.amplitude_a == self.amplitude_b {
            return Err(ScenarioError::Config("runs A and B must use different settings".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyReport {
    pub t_in: f64,
    pub t_gate: f64,
    pub points: usize,
    pub valid_points: usize,
    /// Largest |z_A − z_B| over the shared worldline span.
    pub trajectory_divergence: f64,
    pub max_diff_ret: f64,
    pub max_diff_adv: f64,
    /// `max_diff_adv / max |u_adv|` over valid points.
    pub rel_diff_adv: f64,
    pub max_diff_sym: f64,
    /// Largest |Δu_adv| at points whose advanced root precedes the switch-on.
    pub max_diff_adv_inside_cone: f64,
    /// Largest |Δu_ret| with only the retarded part evaluated.
    pub ret_only_max_diff: f64,
}

#[derive(Debug, Clone)]
pub struct CauchyRecord {
    pub report: CauchyReport,
    pub trajectory_a: Trajectory,
    pub trajectory_b: Trajectory,
    pub map_a: FieldMap,
    pub map_b: FieldMap,
}

fn max_valid(f: &ComplexScalarField, valid: &[bool]) -> f64 {
    f.values.iter().zip(valid).filter(|(_, &v)| v).map(|(z, _)| z.norm()).fold(0.0, f64::max)
}

fn worldline(p: &CauchyParams, amplitude: f64) -> Result<Trajectory, ScenarioError> {
    let st = beam_splitter_state(&p.particle, amplitude)?;
    let q0 = p.start.unwrap_or(p.particle.packet.x0);
    let (trs, _) = integrate_many_body(st, [q0], p.particle.n_steps(), p.particle.substeps)?;
    Ok(trs.into_iter().next().expect("one coordinate"))
}

/// Records both runs on the surface and compares them pointwise.
pub fn record_cauchy_surface(p: &CauchyParams) -> Result<CauchyRecord, ScenarioError> {
    p.validate()?;
    let gate = p.gate().expect("validated");
    let ta = worldline(p, p.amplitude_a)?;
    let tb = worldline(p, p.amplitude_b)?;
    let params = SolitonParams::new(p.g0, p.l0, p.particle.mass).map_err(|e| ScenarioError::Config(e.to_string()))?;
    let src = |t: &Trajectory| WorldlineSource::from_nonrelativistic(t.clone(), params, ExternalPotential::free());
    let (sa, sb) = (src(&ta)?, src(&tb)?);

    let s = p.surface;
    let window = MapWindow::hyperplane_x_y(s.t_in, (s.x.min, s.x.max, s.x.n), (s.y.min, s.y.max, s.y.n));
    let map_a = field_map(std::slice::from_ref(&sa), &window, Parts::ALL)?;
    let map_b = field_map(std::slice::from_ref(&sb), &window, Parts::ALL)?;
    let valid: Vec<bool> = map_a.valid.iter().zip(&map_b.valid).map(|(a, b)| *a && *b).collect();

    let d_ret = map_a.difference(&map_b, |m| &m.retarded);
    let d_adv = map_a.difference(&map_b, |m| &m.advanced);
    let d_sym = map_a.difference(&map_b, |m| &m.symmetric);

    let ret_a = field_map(std::slice::from_ref(&sa), &window, Parts::RETARDED)?;
    let ret_b = field_map(std::slice::from_ref(&sb), &window, Parts::RETARDED)?;
    let ret_only = ret_a.difference(&ret_b, |m| &m.retarded);

    // The advanced root precedes the switch-on exactly when the point lies
    // inside the past light cone of the worldline event at the switch-on.
    let zg = ta.at_lambda(gate).ok_or_else(|| ScenarioError::Config("worldline ends before the switch-on".into()))?.z;
    let grid = map_a.grid();
    let inside: Vec<bool> = (0..grid.len())
        .map(|i| {
            let q = grid.point(i);
            let (dx, dy) = (q[0] - zg.x, q[1] - zg.y);
            (dx * dx + dy * dy).sqrt() < gate - s.t_in
        })
        .collect();
    let cone: Vec<bool> = valid.iter().zip(&inside).map(|(v, i)| *v && *i).collect();

    let divergence = ta
        .samples
        .iter()
        .zip(&tb.samples)
        .map(|(a, b)| (a.z.x - b.z.x).abs())
        .fold(0.0, f64::max);
    let max_diff_adv = max_valid(&d_adv, &valid);
    let scale = max_valid(&map_a.advanced, &valid).max(max_valid(&map_b.advanced, &valid));
    let report = CauchyReport {
        t_in: s.t_in,
        t_gate: gate,
        points: valid.len(),
        valid_points: valid.iter().filter(|v| **v).count(),
        trajectory_divergence: divergence,
        max_diff_ret: max_valid(&d_ret, &valid),
        max_diff_adv,
        rel_diff_adv: if scale > 0.0 { max_diff_adv / scale } else { 0.0 },
        max_diff_sym: max_valid(&d_sym, &valid),
        max_diff_adv_inside_cone: max_valid(&d_adv, &cone),
        ret_only_max_diff: max_valid(&ret_only, &valid),
    };
    Ok(CauchyRecord { report, trajectory_a: ta, trajectory_b: tb, map_a, map_b })
}

/// Writes the A and B surface dumps and the pointwise difference maps
/// `cauchy_diff_u_{sym,ret,adv}.dslab`.
pub fn write_cauchy_record(dir: &Path, rec: &CauchyRecord, meta: &RunMeta) -> Result<Vec<PathBuf>, ScenarioError> {
    let mut out = write_field_map(dir, "cauchy_a", &rec.map_a, meta)?;
    out.extend(write_field_map(dir, "cauchy_b", &rec.map_b, meta)?);
    let base = meta.key_values().replace(',', ";");
    type Part = fn(&FieldMap) -> &ComplexScalarField;
    let parts: [(&str, Part); 3] =
        [("u_sym", |m| &m.symmetric), ("u_ret", |m| &m.retarded), ("u_adv", |m| &m.advanced)];
    for (name, part) in parts {
        let d = rec.map_a.difference(&rec.map_b, part);
        let path = dir.join(format!("cauchy_diff_{name}.dslab"));
        let mut w = BufWriter::new(File::create(&path)?);
        write_complex(&mut w, &d, &format!("{base};part=diff_{name};t_in={}", rec.report.t_in))?;
        out.push(path);
    }
    Ok(out)
}
