//! End-to-end experiment harnesses built on the wave, guidance and
//! far-field layers: a tunable beam splitter, an entangled pair with
//! switchable local settings, and far-field recording on a Cauchy surface.

mod beam_splitter;
mod cauchy;
mod epr;

pub use beam_splitter::{
    beam_splitter_state, run_beam_splitter, transmission, tune_barrier, BeamSplitterParams, BeamSplitterReport,
    BeamSplitterRun, FieldMapSpec, MapAxis, TuneResult,
};
pub use cauchy::{record_cauchy_surface, write_cauchy_record, CauchyParams, CauchyRecord, CauchyReport, SurfaceSpec};
pub use epr::{epr_state, run_epr, run_epr_with, EprParams, EprReport, EprRun, OutcomeStats, Settings};

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::farfield::FarFieldError;
use crate::guidance::GuidanceError;
use crate::output::RunMeta;
use crate::spacetime::{Axis, SpacetimeError};
use crate::wave::{ScalarTerm, Sponge, TimeGate, WaveError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("no barrier amplitude brackets the target transmission {target}; scan (amplitude, T): {scan:?}")]
    NoBracket { target: f64, scan: Vec<(f64, f64)> },
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error(transparent)]
    Guidance(#[from] GuidanceError),
    #[error(transparent)]
    FarField(#[from] FarFieldError),
    #[error(transparent)]
    Spacetime(#[from] SpacetimeError),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for ScenarioError {
    fn from(e: std::io::Error) -> Self {
        ScenarioError::Io(e.to_string())
    }
}

/// Uniform 1D grid with periodic wrap and an optional sponge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
    #[serde(default = "default_periodic")]
    pub periodic: bool,
}

fn default_periodic() -> bool {
    true
}

impl LineGrid {
    pub fn axis(&self) -> Axis {
        Axis::new(self.min, self.max, self.n, self.periodic)
    }
}

/// Sponge layer; numerical, so it has defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpongeSpec {
    pub width: f64,
    pub strength: f64,
}

impl SpongeSpec {
    pub fn sponge(&self) -> Sponge {
        Sponge { width: self.width, strength: self.strength }
    }
}

/// Gaussian packet with position spread `sigma` (of `|ψ|²`) and mean momentum `k0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Packet {
    pub x0: f64,
    pub k0: f64,
    pub sigma: f64,
}

impl Packet {
    pub fn eval(&self, x: f64) -> Complex64 {
        let norm = (2.0 * std::f64::consts::PI * self.sigma * self.sigma).powf(-0.25);
        let d = x - self.x0;
        Complex64::from_polar(norm * (-d * d / (4.0 * self.sigma * self.sigma)).exp(), self.k0 * x)
    }

    /// Position spread of `|ψ|²` after free flight for `t` at mass `m`.
    pub fn spread_at(&self, m: f64, t: f64) -> f64 {
        let tau = 2.0 * m * self.sigma * self.sigma;
        self.sigma * (1.0 + (t / tau).powi(2)).sqrt()
    }
}

/// Gaussian scalar barrier on a particle's own coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Barrier {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
    /// Switch-on time; absent means always on.
    #[serde(default)]
    pub on: Option<f64>,
}

impl Barrier {
    pub fn term(&self) -> ScalarTerm {
        ScalarTerm::Gaussian {
            axis: 0,
            center: self.center,
            width: self.width,
            amplitude: self.amplitude,
            gate: self.on.map_or(TimeGate::ALWAYS, TimeGate::from),
        }
    }
}

pub(crate) fn check_resolution(k: f64, axis: &Axis, what: &str) -> Result<(), ScenarioError> {
    // Keep the carrier well inside the resolved band of the grid.
    let kmax = std::f64::consts::PI / axis.spacing();
    if !(k.abs() < 0.5 * kmax) {
        return Err(ScenarioError::Config(format!(
            "{what}: momentum {k} is not resolved by grid spacing {} (needs |k| < {})",
            axis.spacing(),
            0.5 * kmax
        )));
    }
    Ok(())
}

/// Rejects a time step too coarse for the free phase rotation `k²/2m`.
pub(crate) fn check_dispersion(k: f64, mass: f64, dt: f64, what: &str) -> Result<(), ScenarioError> {
    let phase = dt * k * k / (2.0 * mass);
    if !(phase <= 0.5) {
        return Err(ScenarioError::Config(format!(
            "{what}: dt = {dt} turns the carrier phase by {phase:.3} rad per step (limit 0.5); dispersion is not resolved"
        )));
    }
    Ok(())
}

/// Writes a report: the run header line followed by the report as TOML.
pub fn write_report(w: &mut impl Write, meta: &RunMeta, report: &impl Serialize) -> Result<(), ScenarioError> {
    writeln!(w, "{}", meta.header_line())?;
    let body = toml::to_string(report).map_err(|e| ScenarioError::Io(e.to_string()))?;
    w.write_all(body.as_bytes())?;
    Ok(())
}
