//! Closed-form superpositions of exponential modes `c·e^{i(𝐤·𝐱 − ωt)}`.

use num_complex::Complex64;

use crate::spacetime::FourVector;

/// One exponential mode. Complex wave numbers describe evanescent factors:
/// `k = −iκ` gives `e^{κx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub amplitude: Complex64,
    pub k: [Complex64; 3],
    pub omega: Complex64,
}

impl Mode {
    pub fn plane(amplitude: f64, k: [f64; 3], omega: f64) -> Self {
        Self {
            amplitude: Complex64::new(amplitude, 0.0),
            k: k.map(|v| Complex64::new(v, 0.0)),
            omega: Complex64::new(omega, 0.0),
        }
    }

    fn value(&self, x: FourVector) -> Complex64 {
        let i = Complex64::i();
        let arg = self.k[0] * x.x + self.k[1] * x.y + self.k[2] * x.z - self.omega * x.t;
        self.amplitude * (i * arg).exp()
    }

    /// `□` eigenvalue: `□ e^{i(kx−ωt)} = (k·k − ω²) e^{i(kx−ωt)}`.
    fn box_eigenvalue(&self) -> Complex64 {
        self.k[0] * self.k[0] + self.k[1] * self.k[1] + self.k[2] * self.k[2] - self.omega * self.omega
    }
}

/// Value, first derivatives `(∂t, ∂x, ∂y, ∂z)` and d'Alembertian at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub psi: Complex64,
    pub grad: [Complex64; 4],
    pub box_psi: Complex64,
}

impl Jet {
    /// Covariant phase gradient `∂_μ S = Im(ψ̄ ∂_μψ)/|ψ|²`.
    pub fn phase_gradient(&self) -> FourVector {
        let n = self.psi.norm_sqr();
        let g = self.grad.map(|d| (self.psi.conj() * d).im / n);
        FourVector::from_array(g)
    }

    /// `Q = □a/a`, using `□a/a = Re(ψ̄ □ψ)/|ψ|² + (∂S)²`.
    pub fn quantum_potential(&self) -> f64 {
        let n = self.psi.norm_sqr();
        (self.psi.conj() * self.box_psi).re / n + self.phase_gradient().square()
    }

    pub fn amplitude(&self) -> f64 {
        self.psi.norm()
    }
}

/// Finite sum of modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeSum {
    pub modes: Vec<Mode>,
}

impl ModeSum {
    pub fn new(modes: Vec<Mode>) -> Self {
        Self { modes }
    }

    pub fn eval(&self, x: FourVector) -> Complex64 {
        self.modes.iter().map(|m| m.value(x)).sum()
    }

    pub fn jet(&self, x: FourVector) -> Jet {
        let i = Complex64::i();
        let mut psi = Complex64::new(0.0, 0.0);
        let mut grad = [Complex64::new(0.0, 0.0); 4];
        let mut box_psi = Complex64::new(0.0, 0.0);
        for m in &self.modes {
            let v = m.value(x);
            psi += v;
            grad[0] += -i * m.omega * v;
            for j in 0..3 {
                grad[j + 1] += i * m.k[j] * v;
            }
            box_psi += m.box_eigenvalue() * v;
        }
        Jet { psi, grad, box_psi }
    }

    /// One-dimensional Klein–Gordon wave packet: modes `k0 ± 6σk` with Gaussian
    /// weights, centred at `x0` at `t = 0`, all on the positive-frequency shell.
    pub fn klein_gordon_packet(omega0: f64, k0: f64, sigma_k: f64, x0: f64, n_modes: usize) -> Self {
        assert!(n_modes >= 3, "packet needs at least three modes");
        let span = 6.0 * sigma_k;
        let dk = 2.0 * span / (n_modes - 1) as f64;
        let modes = (0..n_modes)
            .map(|j| {
                let k = k0 - span + j as f64 * dk;
                let w = (-(k - k0) * (k - k0) / (4.0 * sigma_k * sigma_k)).exp() * dk;
                let omega = (omega0 * omega0 + k * k).sqrt();
                Mode {
                    amplitude: Complex64::from_polar(w, -k * x0),
                    k: [Complex64::new(k, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
                    omega: Complex64::new(omega, 0.0),
                }
            })
            .collect();
        Self { modes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_matches_finite_differences() {
        let m = ModeSum::klein_gordon_packet(1.0, 0.5, 0.3, 0.0, 41);
        let x = FourVector::new(0.7, 0.4, 0.0, 0.0);
        let h = 1e-4;
        let j = m.jet(x);
        let dt = (m.eval(x + FourVector::new(h, 0.0, 0.0, 0.0)) - m.eval(x - FourVector::new(h, 0.0, 0.0, 0.0))) / (2.0 * h);
        let dx = (m.eval(x + FourVector::new(0.0, h, 0.0, 0.0)) - m.eval(x - FourVector::new(0.0, h, 0.0, 0.0))) / (2.0 * h);
        assert!((dt - j.grad[0]).norm() < 1e-7 && (dx - j.grad[1]).norm() < 1e-7);
        // Each mode is on shell, so □ψ = −ω0² ψ.
        assert!((j.box_psi + j.psi).norm() < 1e-12 * j.psi.norm().max(1.0));
    }

    #[test]
    fn standing_wave_quantum_potential() {
        let k = 1.0;
        let w = 2f64.sqrt();
        let m = ModeSum::new(vec![Mode::plane(0.5, [k, 0.0, 0.0], w), Mode::plane(0.5, [-k, 0.0, 0.0], w)]);
        let q = m.jet(FourVector::new(0.3, 0.2, 0.0, 0.0)).quantum_potential();
        assert!((q - 1.0).abs() < 1e-12);
    }
}
