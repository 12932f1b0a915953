use super::SolitonParams;

/// `F_α(r) = (√α g0/4π)/√(α²r² + l0²)`.
pub fn lane_emden_profile(p: &SolitonParams, alpha: f64, r: f64) -> f64 {
    alpha.sqrt() * p.charge() / (alpha * alpha * r * r + p.l0 * p.l0).sqrt()
}

/// How the radial Laplacian is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidualMode {
    Analytic,
    /// Central differences with spacing `dr`.
    FiniteDifference { dr: f64 },
}

/// Power of the nonlinear term; [`Exponent::LANE_EMDEN`] is the physical one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exponent(pub i32);

impl Exponent {
    pub const LANE_EMDEN: Exponent = Exponent(5);
}

/// `∇²f + K f^n` for the Lane–Emden profile at each radius (all `r > 0`).
pub fn lane_emden_residual(p: &SolitonParams, alpha: f64, r_grid: &[f64], mode: ResidualMode, exponent: Exponent) -> Vec<f64> {
    let k = p.nonlinearity();
    let c = alpha.sqrt() * p.charge();
    let l2 = p.l0 * p.l0;
    r_grid
        .iter()
        .map(|&r| {
            let f = lane_emden_profile(p, alpha, r);
            let lap = match mode {
                ResidualMode::Analytic => {
                    let s = alpha * alpha * r * r + l2;
                    -3.0 * c * alpha * alpha * l2 / (s * s * s.sqrt())
                }
                ResidualMode::FiniteDifference { dr } => {
                    let fp = lane_emden_profile(p, alpha, r + dr);
                    let fm = lane_emden_profile(p, alpha, r - dr);
                    (fp - 2.0 * f + fm) / (dr * dr) + (fp - fm) / (dr * r)
                }
            };
            lap + k * f.powi(exponent.0)
        })
        .collect()
}

/// Profile value in the tachyonic regime, with a validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TachyonicValue {
    pub value: f64,
    pub valid: bool,
}

/// `G_α = (√α g0/4π)/√(α²(y² + z² − x''²) + l0²)` in the comoving frame of
/// a tachyonic core, where `x''` runs along the spacelike velocity.
///
/// Points with `y² + z² − x''² < −½(l0/α)²` lie in the exclusion band of the
/// singular hyperboloid or beyond it and are flagged invalid.
pub fn tachyonic_profile(p: &SolitonParams, alpha: f64, x_pp: f64, y: f64, z: f64) -> TachyonicValue {
    let h = y * y + z * z - x_pp * x_pp;
    let band = 0.5 * (p.l0 / alpha).powi(2);
    let arg = alpha * alpha * h + p.l0 * p.l0;
    if h < -band || arg <= 0.0 {
        return TachyonicValue { value: f64::NAN, valid: false };
    }
    TachyonicValue { value: alpha.sqrt() * p.charge() / arg.sqrt(), valid: true }
}
