//! Distribution functions for Born sampling and Kolmogorov–Smirnov checks.

use crate::spacetime::Axis;

/// Cumulative distribution of a density sampled on an axis, taking the
/// density piecewise linear between nodes. Periodic axes include the cell
/// that wraps from the last node back to the first.
#[derive(Debug, Clone)]
pub struct GridCdf {
    axis: Axis,
    rho: Vec<f64>,
    /// Cumulative mass at the left edge of each cell, normalized to end at 1.
    cum: Vec<f64>,
    total: f64,
}

impl GridCdf {
    /// Returns `None` when the density has no positive mass.
    pub fn new(axis: Axis, rho: &[f64]) -> Option<Self> {
        assert_eq!(rho.len(), axis.n);
        let h = axis.spacing();
        let cells = if axis.periodic { axis.n } else { axis.n - 1 };
        let mut cum = Vec::with_capacity(cells + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for j in 0..cells {
            let r1 = rho[(j + 1) % axis.n];
            acc += 0.5 * h * (rho[j].max(0.0) + r1.max(0.0));
            cum.push(acc);
        }
        if !(acc > 0.0 && acc.is_finite()) {
            return None;
        }
        for c in &mut cum {
            *c /= acc;
        }
        Some(Self { axis, rho: rho.iter().map(|r| r.max(0.0) / acc).collect(), cum, total: acc })
    }

    /// Integral of the unnormalized density.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    fn cells(&self) -> usize {
        self.cum.len() - 1
    }

    /// CDF at `x`; clamps to 0 and 1 outside open axes.
    pub fn cdf(&self, x: f64) -> f64 {
        let h = self.axis.spacing();
        let s = (x - self.axis.min) / h;
        if s <= 0.0 {
            return 0.0;
        }
        let j = s.floor() as usize;
        if j >= self.cells() {
            return 1.0;
        }
        let u = s - j as f64;
        let r0 = self.rho[j];
        let r1 = self.rho[(j + 1) % self.axis.n];
        (self.cum[j] + h * (r0 * u + 0.5 * (r1 - r0) * u * u)).min(1.0)
    }

    /// Inverse CDF at `p ∈ [0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        let h = self.axis.spacing();
        let j = match self.cum.partition_point(|&c| c <= p) {
            0 => 0,
            k => (k - 1).min(self.cells() - 1),
        };
        let q = (p - self.cum[j]) / h;
        let r0 = self.rho[j];
        let d = self.rho[(j + 1) % self.axis.n] - r0;
        let disc = (r0 * r0 + 2.0 * d * q).max(0.0);
        let denom = r0 + disc.sqrt();
        let u = if denom > 0.0 { (2.0 * q / denom).clamp(0.0, 1.0) } else { 0.0 };
        self.axis.min + (j as f64 + u) * h
    }
}

/// One-sample KS distance of `samples` against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs: Vec<f64> = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}
