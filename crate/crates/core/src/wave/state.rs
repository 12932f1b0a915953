use num_complex::Complex64;

use super::{ExternalPotential, KleinGordonStepper, ModeSum, SchrodingerStepper, WaveError};
use crate::spacetime::ComplexScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Schrodinger,
    KleinGordon,
}

/// Quadratic damping layer of the given width at every grid edge.
///
/// Each step multiplies Ψ by `exp(−strength·dt·(d/width)²)` where `d` is the
/// depth into the layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sponge {
    pub width: f64,
    pub strength: f64,
}

/// Closed-form description carried by reference waves.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticTruth {
    pub modes: ModeSum,
    pub omega: f64,
    /// Expected `ω0² + Q`.
    pub mass_squared: f64,
    /// The amplitude is time independent, so `∂t²a = 0`.
    pub static_amplitude: bool,
    /// The field is a diagnostic construction, not a solution of the wave equation.
    pub test_mode: bool,
}

/// Guiding wave at one time slice.
///
/// In the Schrödinger regime every grid axis is the coordinate of one
/// particle and `omega0` is that particle's mass; `potentials[j]` acts on
/// axis `j` as a function of that coordinate alone, so its terms use axis 0.
/// In the Klein–Gordon regime the grid is one-dimensional and
/// `potentials` has a single entry.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub psi: ComplexScalarField,
    pub omega0: f64,
    pub potentials: Vec<ExternalPotential>,
    pub regime: Regime,
    pub prev: Option<ComplexScalarField>,
    pub sponge: Option<Sponge>,
    pub truth: Option<AnalyticTruth>,
}

impl WaveState {
    pub fn new(
        psi: ComplexScalarField,
        omega0: f64,
        potentials: Vec<ExternalPotential>,
        regime: Regime,
    ) -> Result<Self, WaveError> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(WaveError::InvalidParams(format!("omega0 must be positive, got {omega0}")));
        }
        let dims = psi.grid.dims();
        match regime {
            Regime::Schrodinger if potentials.len() != dims => {
                return Err(WaveError::InvalidParams(format!(
                    "schrodinger regime needs one potential per axis ({dims}), got {}",
                    potentials.len()
                )))
            }
            Regime::KleinGordon if dims != 1 || potentials.len() != 1 => {
                return Err(WaveError::Unsupported("klein_gordon regime is 1+1 dimensional with one potential".into()))
            }
            _ => {}
        }
        Ok(Self { psi, omega0, potentials, regime, prev: None, sponge: None, truth: None })
    }

    pub fn time(&self) -> f64 {
        self.psi.time_label
    }

    pub fn dt(&self) -> f64 {
        self.psi.grid.dt()
    }

    pub fn potential(&self) -> &ExternalPotential {
        &self.potentials[0]
    }

    /// Starts a Klein–Gordon state from Ψ and ∂tΨ with a second-order Taylor
    /// step back to `t − dt`, using the wave equation for ∂t²Ψ.
    pub fn klein_gordon_from_derivative(
        psi: ComplexScalarField,
        dpsi_dt: &[Complex64],
        omega0: f64,
        potential: ExternalPotential,
    ) -> Result<Self, WaveError> {
        let mut s = Self::new(psi, omega0, vec![potential], Regime::KleinGordon)?;
        let dt = s.dt();
        // Work in the gauge without uniform terms, then rotate back.
        let ec = s.potential().charge * s.potential().constant_part(s.time());
        let i = Complex64::i();
        let reduced: Vec<Complex64> = s.psi.values.iter().zip(dpsi_dt).map(|(p, d)| d + i * ec * p).collect();
        let acc = KleinGordonStepper::acceleration(&s, &reduced);
        let rot = KleinGordonStepper::gauge_rotation(&s).conj();
        let prev: Vec<Complex64> = s
            .psi
            .values
            .iter()
            .zip(&reduced)
            .zip(&acc)
            .map(|((p, d), a)| rot * (p - d * dt + a * (0.5 * dt * dt)))
            .collect();
        s.prev = Some(ComplexScalarField::new(s.psi.grid.clone(), prev, s.time() - dt)?);
        Ok(s)
    }
}

/// Time stepper for either regime.
pub enum Evolver {
    Schrodinger(SchrodingerStepper),
    KleinGordon(KleinGordonStepper),
}

impl Evolver {
    pub fn new(state: &WaveState) -> Result<Self, WaveError> {
        Ok(match state.regime {
            Regime::Schrodinger => Evolver::Schrodinger(SchrodingerStepper::new(state)?),
            Regime::KleinGordon => Evolver::KleinGordon(KleinGordonStepper::new(state)?),
        })
    }

    /// Advances `state` by one time step; `prev` receives the old slice.
    pub fn step(&mut self, state: &mut WaveState) -> Result<(), WaveError> {
        match self {
            Evolver::Schrodinger(s) => s.step(state)?,
            Evolver::KleinGordon(k) => k.step(state)?,
        }
        if let Some(sp) = state.sponge {
            apply_sponge(state, sp);
        }
        state.truth = None;
        Ok(())
    }
}

fn apply_sponge(state: &mut WaveState, sp: Sponge) {
    let grid = state.psi.grid.clone();
    let dt = grid.dt();
    for (i, v) in state.psi.values.iter_mut().enumerate() {
        let p = grid.point(i);
        let mut depth2 = 0.0;
        for (k, a) in grid.axes().iter().enumerate() {
            let d = (a.min + sp.width - p[k]).max(p[k] - (a.max - sp.width)).max(0.0);
            depth2 += (d / sp.width).powi(2);
        }
        if depth2 > 0.0 {
            *v *= (-sp.strength * dt * depth2).exp();
        }
    }
}

/// Advances a copy of `state` by `n_steps`.
pub fn evolve(mut state: WaveState, n_steps: usize) -> Result<WaveState, WaveError> {
    let mut ev = Evolver::new(&state)?;
    for step in 0..n_steps {
        ev.step(&mut state)?;
        if !state.psi.is_finite() {
            return Err(WaveError::NonFinite { step: step + 1, time: state.time() });
        }
    }
    Ok(state)
}
