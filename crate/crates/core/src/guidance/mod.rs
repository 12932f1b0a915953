//! Pilot-wave trajectories.
//!
//! Relativistic single-particle trajectories follow `ż ∝ −(∂S + eA)` in both
//! the subluminal and the tachyonic regime of the variable mass. They are
//! integrated in a natural parameter σ with `dz/dσ = ∓(∂S + eA)^♯/ω0` and
//! `dλ/dσ = √|M²|/ω0`, which stays regular where `M²` changes sign. The
//! nonrelativistic many-body flow is co-evolved with a Schrödinger wave on
//! its configuration grid.

mod born;
mod ensemble;
mod field;
mod hyperplane;
mod newton;
mod trajectory;
mod velocity;

pub use born::{sample_born, EnsembleSpec};
pub use ensemble::{integrate_many_body, transport, MemberStatus, TransportOptions, TransportResult, VelocityGrid};
pub use field::{AnalyticField, GriddedField, GuidingField, LocalWave};
pub use hyperplane::find_hyperplane_lambda;
pub use newton::{newton_residual, NewtonReport};
pub use trajectory::{
    integrate_trajectory, write_trajectory_csv, CriticalEvent, Trajectory, TrajectoryKind, TrajectoryOptions,
    TrajectoryPoint, TrajectorySample, TrajectoryStatus,
};
pub use velocity::{classify, velocity, Velocity};

use thiserror::Error;

use crate::wave::WaveError;

/// Critical band half-width relative to `ω0²`.
pub const MASS_EPS_REL: f64 = 1e-8;

/// Sign class of the variable mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subluminal,
    Tachyonic,
    Critical,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Subluminal => "subluminal",
            Regime::Tachyonic => "tachyonic",
            Regime::Critical => "critical",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GuidanceError {
    #[error("point {0:?} lies outside the guiding field's domain")]
    OutsideDomain([f64; 4]),
    #[error("point {0:?} lies in a node region where the phase is undefined")]
    Masked([f64; 4]),
    #[error("no hyperplane root in the sampled range")]
    NoHyperplaneRoot,
    #[error("probability density has zero norm")]
    ZeroNorm,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for GuidanceError {
    fn from(e: std::io::Error) -> Self {
        GuidanceError::Io(e.to_string())
    }
}
