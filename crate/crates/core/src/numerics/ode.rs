//! Dormand–Prince 5(4) stepping with the classical 4th-order dense output.

/// Fixed-size ODE state.
pub type State<const N: usize> = [f64; N];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerances and step limits for the adaptive driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_init: 1e-3, h_min: 1e-12, h_max: f64::INFINITY, max_steps: 10_000_000 }
    }
}

/// Interpolant over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub s0: f64,
    pub h: f64,
    pub y0: State<N>,
    pub y1: State<N>,
    r2: State<N>,
    r3: State<N>,
    r4: State<N>,
    r5: State<N>,
    /// Derivative at the end of the step (first-same-as-last).
    pub f1: State<N>,
}

impl<const N: usize> DenseStep<N> {
    pub fn s1(&self) -> f64 {
        self.s0 + self.h
    }

    /// State at `s0 + θh`, `θ ∈ [0, 1]`.
    pub fn eval(&self, theta: f64) -> State<N> {
        let t1 = 1.0 - theta;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = self.y0[i] + theta * (self.r2[i] + t1 * (self.r3[i] + theta * (self.r4[i] + t1 * self.r5[i])));
        }
        out
    }

    pub fn eval_at(&self, s: f64) -> State<N> {
        self.eval((s - self.s0) / self.h)
    }
}

/// Outcome of a single trial step.
pub struct Trial<const N: usize> {
    pub dense: DenseStep<N>,
    /// Weighted RMS error estimate; the step is acceptable when ≤ 1.
    pub error: f64,
}

fn axpy<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince trial step from `(s, y)` with derivative `f0` already known.
pub fn dopri_step<const N: usize, E>(
    f: &mut impl FnMut(f64, &State<N>) -> Result<State<N>, E>,
    s: f64,
    y: &State<N>,
    f0: &State<N>,
    h: f64,
    tol: &Tolerances,
) -> Result<Trial<N>, E> {
    let k1 = *f0;
    let k2 = f(s + C2 * h, &axpy(y, h, &[(A21, &k1)]))?;
    let k3 = f(s + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]))?;
    let k4 = f(s + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(s + C5 * h, &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = f(s + h, &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
    let y1 = axpy(y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(s + h, &y1)?;

    let mut err = 0.0;
    let mut r2 = [0.0; N];
    let mut r3 = [0.0; N];
    let mut r4 = [0.0; N];
    let mut r5 = [0.0; N];
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = tol.atol + tol.rtol * y[i].abs().max(y1[i].abs());
        err += (e / sc) * (e / sc);
        let dy = y1[i] - y[i];
        let bspl = h * k1[i] - dy;
        r2[i] = dy;
        r3[i] = bspl;
        r4[i] = dy - h * k7[i] - bspl;
        r5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    let error = (err / N as f64).sqrt();
    Ok(Trial { dense: DenseStep { s0: s, h, y0: *y, y1, r2, r3, r4, r5, f1: k7 }, error })
}

/// Step-size factor after a trial with the given error estimate.
pub fn step_factor(error: f64) -> f64 {
    if error == 0.0 {
        5.0
    } else {
        (0.9 * error.powf(-0.2)).clamp(0.2, 5.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OdeError<E> {
    Rhs(E),
    StepCollapse { s: f64, h: f64 },
    TooManySteps { s: f64 },
}

/// Integrates from `s0` to `s1 > s0`, handing every accepted step to `visit`.
/// `visit` returns `false` to stop early. Returns the final `(s, y)`.
pub fn integrate<const N: usize, E>(
    mut f: impl FnMut(f64, &State<N>) -> Result<State<N>, E>,
    s0: f64,
    y0: State<N>,
    s1: f64,
    tol: &Tolerances,
    mut visit: impl FnMut(&DenseStep<N>) -> bool,
) -> Result<(f64, State<N>), OdeError<E>> {
    let mut s = s0;
    let mut y = y0;
    let mut f0 = f(s, &y).map_err(OdeError::Rhs)?;
    let mut h = tol.h_init.min(tol.h_max).min(s1 - s0);
    for _ in 0..tol.max_steps {
        if s >= s1 {
            return Ok((s, y));
        }
        let last = s + h >= s1;
        let hh = if last { s1 - s } else { h };
        let trial = dopri_step(&mut f, s, &y, &f0, hh, tol).map_err(OdeError::Rhs)?;
        if trial.error <= 1.0 {
            let keep_going = visit(&trial.dense);
            s = if last { s1 } else { s + hh };
            y = trial.dense.y1;
            f0 = trial.dense.f1;
            if !keep_going {
                return Ok((s, y));
            }
            h = (hh * step_factor(trial.error)).min(tol.h_max);
        } else {
            h = hh * step_factor(trial.error).min(1.0);
            if h < tol.h_min {
                return Err(OdeError::StepCollapse { s, h });
            }
        }
    }
    Err(OdeError::TooManySteps { s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_to_tolerance() {
        let tol = Tolerances { rtol: 1e-11, atol: 1e-13, ..Default::default() };
        let (s, y) = integrate(|_, y: &State<1>| Ok::<_, ()>([-y[0]]), 0.0, [1.0], 3.0, &tol, |_| true).unwrap();
        assert_eq!(s, 3.0);
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn dense_output_is_fourth_order_accurate() {
        let tol = Tolerances { rtol: 1e-9, atol: 1e-12, ..Default::default() };
        let mut worst: f64 = 0.0;
        integrate(
            |s, _y: &State<2>| Ok::<_, ()>([s.cos(), -s.sin()]),
            0.0,
            [0.0, 1.0],
            10.0,
            &tol,
            |d| {
                for j in 1..10 {
                    let th = j as f64 / 10.0;
                    let s = d.s0 + th * d.h;
                    let y = d.eval(th);
                    worst = worst.max((y[0] - s.sin()).abs()).max((y[1] - s.cos()).abs());
                }
                true
            },
        )
        .unwrap();
        assert!(worst < 1e-8, "dense output error {worst}");
    }

    #[test]
    fn stiff_failure_reports_collapse() {
        let tol = Tolerances { h_min: 1e-3, ..Default::default() };
        let r = integrate(|s, _y: &State<1>| Ok::<_, ()>([1.0 / (1.0 - s)]), 0.0, [0.0], 2.0, &tol, |_| true);
        assert!(matches!(r, Err(OdeError::StepCollapse { .. })));
    }
}
