use num_complex::Complex64;

use super::{Regime, ScalarTerm, WaveError, WaveState};
use crate::numerics::linalg::Tridiagonal;
use crate::spacetime::ComplexScalarField;

/// Crank–Nicolson propagator for `i∂tψ = Σ_j [−∂_j²/(2m) + eV_j(x_j, t)] ψ`.
///
/// Each axis contributes a Cayley factor `(1 + iτH_j)⁻¹(1 − iτH_j)` with
/// `τ = dt/2` and `V` sampled at the half step. The axis Hamiltonians
/// commute, so the product is exactly the implicit-midpoint step of the
/// full Hamiltonian and remains unitary. The scheme is unconditionally
/// stable for any `dt > 0`. Uniform potential terms are applied as an
/// exact phase rotation.
pub struct SchrodingerStepper {
    axes: Vec<AxisOperator>,
}

struct AxisOperator {
    kappa: f64,
    tau: f64,
    periodic: bool,
    potential: Vec<f64>,
    lhs: Option<Tridiagonal>,
}

impl AxisOperator {
    fn refresh(&mut self, ev: Vec<f64>) {
        if self.lhs.is_some() && ev == self.potential {
            return;
        }
        let n = ev.len();
        let i = Complex64::i();
        let off = -i * (self.tau * self.kappa);
        let a = vec![off; n];
        let b: Vec<Complex64> = ev.iter().map(|v| 1.0 + i * (self.tau * (2.0 * self.kappa + v))).collect();
        self.lhs = Some(Tridiagonal::new(&a, &b, &a, self.periodic));
        self.potential = ev;
    }

    /// Applies the Cayley factor along an axis with `n` nodes and row stride `lanes`.
    fn apply(&self, values: &mut [Complex64], lanes: usize, scratch: &mut Vec<Complex64>) {
        let n = self.potential.len();
        let i = Complex64::i();
        let lhs = self.lhs.as_ref().expect("refreshed before use");
        let block = n * lanes;
        for chunk in values.chunks_exact_mut(block) {
            scratch.clear();
            scratch.resize(block, Complex64::new(0.0, 0.0));
            for r in 0..n {
                let up = if r + 1 < n { Some(r + 1) } else if self.periodic { Some(0) } else { None };
                let dn = if r > 0 { Some(r - 1) } else if self.periodic { Some(n - 1) } else { None };
                let diag = 1.0 - i * (self.tau * (2.0 * self.kappa + self.potential[r]));
                let off = i * (self.tau * self.kappa);
                for l in 0..lanes {
                    let mut acc = diag * chunk[r * lanes + l];
                    if let Some(u) = up {
                        acc += off * chunk[u * lanes + l];
                    }
                    if let Some(d) = dn {
                        acc += off * chunk[d * lanes + l];
                    }
                    scratch[r * lanes + l] = acc;
                }
            }
            lhs.solve_lanes(scratch, lanes);
            chunk.copy_from_slice(scratch);
        }
    }
}

impl SchrodingerStepper {
    pub fn new(state: &WaveState) -> Result<Self, WaveError> {
        if state.regime != Regime::Schrodinger {
            return Err(WaveError::InvalidParams("state is not in the schrodinger regime".into()));
        }
        if state.potentials.iter().any(|p| p.has_vector_potential()) {
            return Err(WaveError::Unsupported("vector potentials in the schrodinger regime".into()));
        }
        // Each particle's potential is a function of its own coordinate only.
        let off_axis = state.potentials.iter().flat_map(|p| &p.scalar).any(|t| matches!(t, ScalarTerm::Gaussian { axis, .. } if *axis != 0));
        if off_axis {
            return Err(WaveError::InvalidParams("schrodinger potential terms must act on axis 0 of their particle".into()));
        }
        let grid = &state.psi.grid;
        let tau = 0.5 * grid.dt();
        let axes = grid
            .axes()
            .iter()
            .map(|a| {
                let h = a.spacing();
                AxisOperator {
                    kappa: 1.0 / (2.0 * state.omega0 * h * h),
                    tau,
                    periodic: a.periodic,
                    potential: Vec::new(),
                    lhs: None,
                }
            })
            .collect();
        Ok(Self { axes })
    }

    pub fn step(&mut self, state: &mut WaveState) -> Result<(), WaveError> {
        let grid = state.psi.grid.clone();
        let dt = grid.dt();
        let t_mid = state.time() + 0.5 * dt;
        let old = state.psi.values.clone();
        let mut scratch = Vec::new();
        let mut uniform = 0.0;
        for (k, op) in self.axes.iter_mut().enumerate() {
            let pot = &state.potentials[k];
            let ev: Vec<f64> = grid.axis(k).coords().iter().map(|&x| pot.charge * pot.localized_part(t_mid, [x, 0.0, 0.0])).collect();
            op.refresh(ev);
            op.apply(&mut state.psi.values, grid.stride(k), &mut scratch);
            uniform += pot.charge * pot.constant_part(t_mid);
        }
        if uniform != 0.0 {
            let rot = Complex64::from_polar(1.0, -uniform * dt);
            for v in &mut state.psi.values {
                *v *= rot;
            }
        }
        state.prev = Some(ComplexScalarField::new(grid, old, state.time())?);
        state.psi.time_label += dt;
        Ok(())
    }
}
