use crate::spacetime::FourVector;

/// Activity window of a gated potential term: on for `on ≤ t < off`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGate {
    pub on: f64,
    pub off: f64,
}

impl TimeGate {
    pub const ALWAYS: TimeGate = TimeGate { on: f64::NEG_INFINITY, off: f64::INFINITY };

    pub fn from(on: f64) -> Self {
        Self { on, off: f64::INFINITY }
    }

    pub fn active(&self, t: f64) -> bool {
        t >= self.on && t < self.off
    }
}

/// One additive contribution to the scalar potential `V`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarTerm {
    /// Spatially uniform offset. Pure gauge: it only rotates the global phase.
    Constant { value: f64 },
    /// `amplitude · exp(−(x_axis − center)² / (2 width²))`, active inside `gate`.
    Gaussian { axis: usize, center: f64, width: f64, amplitude: f64, gate: TimeGate },
}

/// Vector potential `𝐀`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum VectorTerm {
    #[default]
    None,
    Uniform([f64; 3]),
    /// Uniform magnetic field `B ẑ` in the symmetric gauge `𝐀 = B(−y, x, 0)/2`.
    MagneticZ { b: f64 },
}

/// External electromagnetic potential `A^μ = (V, 𝐀)` and the coupling `e`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExternalPotential {
    pub charge: f64,
    pub scalar: Vec<ScalarTerm>,
    pub vector: VectorTerm,
}

impl ExternalPotential {
    pub fn free() -> Self {
        Self::default()
    }

    pub fn with_charge(charge: f64) -> Self {
        Self { charge, ..Self::default() }
    }

    pub fn push(mut self, term: ScalarTerm) -> Self {
        self.scalar.push(term);
        self
    }

    /// Scalar potential `V(t, 𝐱)`.
    pub fn scalar_at(&self, t: f64, pos: [f64; 3]) -> f64 {
        self.constant_part(t) + self.localized_part(t, pos)
    }

    /// Sum of the uniform terms.
    pub fn constant_part(&self, _t: f64) -> f64 {
        self.scalar
            .iter()
            .map(|s| match s {
                ScalarTerm::Constant { value } => *value,
                _ => 0.0,
            })
            .sum()
    }

    /// Sum of the spatially varying terms.
    pub fn localized_part(&self, t: f64, pos: [f64; 3]) -> f64 {
        self.scalar
            .iter()
            .map(|s| match s {
                ScalarTerm::Gaussian { axis, center, width, amplitude, gate } if gate.active(t) => {
                    let d = pos[*axis] - center;
                    amplitude * (-0.5 * d * d / (width * width)).exp()
                }
                _ => 0.0,
            })
            .sum()
    }

    /// `∇V` of the localized terms at time `t`.
    pub fn scalar_gradient(&self, t: f64, pos: [f64; 3]) -> [f64; 3] {
        let mut g = [0.0; 3];
        for s in &self.scalar {
            if let ScalarTerm::Gaussian { axis, center, width, amplitude, gate } = s {
                if gate.active(t) {
                    let d = pos[*axis] - center;
                    g[*axis] += -amplitude * d / (width * width) * (-0.5 * d * d / (width * width)).exp();
                }
            }
        }
        g
    }

    pub fn vector_at(&self, _t: f64, pos: [f64; 3]) -> [f64; 3] {
        match self.vector {
            VectorTerm::None => [0.0; 3],
            VectorTerm::Uniform(a) => a,
            VectorTerm::MagneticZ { b } => [-0.5 * b * pos[1], 0.5 * b * pos[0], 0.0],
        }
    }

    /// Contravariant `A^μ(x) = (V, Ax, Ay, Az)`.
    pub fn four_potential(&self, x: FourVector) -> FourVector {
        let p = x.spatial();
        let a = self.vector_at(x.t, p);
        FourVector::new(self.scalar_at(x.t, p), a[0], a[1], a[2])
    }

    /// `e·A^μ(x)`.
    pub fn e_four_potential(&self, x: FourVector) -> FourVector {
        self.four_potential(x) * self.charge
    }

    /// Field tensor `F^{μν} = ∂^μA^ν − ∂^νA^μ`. Gate switching is treated as
    /// instantaneous and contributes nothing between switch times.
    pub fn field_tensor(&self, x: FourVector) -> [[f64; 4]; 4] {
        let mut f = [[0.0; 4]; 4];
        let gv = self.scalar_gradient(x.t, x.spatial());
        // F^{0i} = ∂_t A^i + ∂_i V = −E_i for static 𝐀.
        for i in 0..3 {
            f[0][i + 1] = gv[i];
            f[i + 1][0] = -gv[i];
        }
        if let VectorTerm::MagneticZ { b } = self.vector {
            // F^{12} = −∂_x A_y + ∂_y A_x = −B.
            f[1][2] = -b;
            f[2][1] = b;
        }
        f
    }

    pub fn has_vector_potential(&self) -> bool {
        !matches!(self.vector, VectorTerm::None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_switches_barrier() {
        let p = ExternalPotential::with_charge(1.0).push(ScalarTerm::Gaussian {
            axis: 0,
            center: 0.0,
            width: 0.5,
            amplitude: 2.0,
            gate: TimeGate::from(1.0),
        });
        assert_eq!(p.scalar_at(0.5, [0.0; 3]), 0.0);
        assert_eq!(p.scalar_at(1.0, [0.0; 3]), 2.0);
    }

    #[test]
    fn field_tensor_matches_finite_differences() {
        let p = ExternalPotential {
            charge: 1.0,
            scalar: vec![ScalarTerm::Gaussian { axis: 0, center: 0.3, width: 0.7, amplitude: 1.5, gate: TimeGate::ALWAYS }],
            vector: VectorTerm::MagneticZ { b: 0.8 },
        };
        let x = FourVector::new(0.0, 0.1, -0.4, 0.2);
        let h = 1e-5;
        let f = p.field_tensor(x);
        // ∂^μ = (∂_t, −∇)
        let e = [FourVector::new(1.0, 0.0, 0.0, 0.0), FourVector::new(0.0, 1.0, 0.0, 0.0), FourVector::new(0.0, 0.0, 1.0, 0.0), FourVector::new(0.0, 0.0, 0.0, 1.0)];
        let sign = [1.0, -1.0, -1.0, -1.0];
        for mu in 0..4 {
            for nu in 0..4 {
                let d = |m: usize, n: usize| {
                    let ap = p.four_potential(x + e[m] * h).to_array()[n];
                    let am = p.four_potential(x - e[m] * h).to_array()[n];
                    sign[m] * (ap - am) / (2.0 * h)
                };
                let fd = d(mu, nu) - d(nu, mu);
                assert!((fd - f[mu][nu]).abs() < 1e-8, "F[{mu}][{nu}] {fd} vs {}", f[mu][nu]);
            }
        }
    }
}
