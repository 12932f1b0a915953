use super::GuidanceError;
use crate::numerics::rng::{streams, SeedStream};
use crate::numerics::stats::GridCdf;
use crate::wave::WaveState;

/// Ensemble request: `n` members drawn from `|Ψ|²` at `initial_time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub n: usize,
    pub seed: u64,
    pub initial_time: f64,
}

/// Draws configuration points from the Born density of a 1D or 2D state.
///
/// The density is taken piecewise linear along each axis (bilinear in 2D).
/// The first coordinate comes from the marginal, the second from the exact
/// conditional of the bilinear density. Identical seeds give identical
/// ensembles.
pub fn sample_born<const D: usize>(state: &WaveState, spec: &EnsembleSpec) -> Result<Vec<[f64; D]>, GuidanceError> {
    let grid = &state.psi.grid;
    if grid.dims() != D || !(1..=2).contains(&D) {
        return Err(GuidanceError::Dimension(format!("state has {} axes, requested {D}", grid.dims())));
    }
    if (spec.initial_time - state.time()).abs() > 0.5 * state.dt() {
        return Err(GuidanceError::InvalidParams(format!(
            "ensemble time {} does not match the state at {}",
            spec.initial_time,
            state.time()
        )));
    }
    let rho = state.psi.density().values;
    let mut rng = SeedStream::new(spec.seed, streams::BORN_SAMPLING);
    let a0 = *grid.axis(0);
    if D == 1 {
        let cdf = GridCdf::new(a0, &rho).ok_or(GuidanceError::ZeroNorm)?;
        return Ok((0..spec.n)
            .map(|_| {
                let mut q = [0.0; D];
                q[0] = cdf.quantile(rng.uniform());
                q
            })
            .collect());
    }
    let a1 = *grid.axis(1);
    let n1 = a1.n;
    let h1 = a1.spacing();
    let row = |i: usize| &rho[i * n1..(i + 1) * n1];
    let row_mass = |r: &[f64]| {
        let cells = if a1.periodic { n1 } else { n1 - 1 };
        (0..cells).map(|j| 0.5 * h1 * (r[j] + r[(j + 1) % n1])).sum::<f64>()
    };
    let marginal: Vec<f64> = (0..a0.n).map(|i| row_mass(row(i))).collect();
    let cdf0 = GridCdf::new(a0, &marginal).ok_or(GuidanceError::ZeroNorm)?;
    let h0 = a0.spacing();
    let mut out = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let x0 = cdf0.quantile(rng.uniform());
        let s = ((x0 - a0.min) / h0).max(0.0);
        let i = (s.floor() as usize).min(if a0.periodic { a0.n - 1 } else { a0.n - 2 });
        let u = s - i as f64;
        let (r0, r1) = (row(i), row((i + 1) % a0.n));
        let cond: Vec<f64> = r0.iter().zip(r1).map(|(p, q)| (1.0 - u) * p + u * q).collect();
        let x1 = match GridCdf::new(a1, &cond) {
            Some(c) => c.quantile(rng.uniform()),
            None => {
                let _ = rng.uniform();
                a1.min
            }
        };
        let mut q = [0.0; D];
        q[0] = x0;
        q[1] = x1;
        out.push(q);
    }
    Ok(out)
}
