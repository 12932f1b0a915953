use std::ops::{Add, Mul, Sub};

use super::{GridSpec, RealField, SpacetimeError, AMPLITUDE_FLOOR_REL};

/// Values that finite-difference stencils can combine.
pub trait Stencil: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl<T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>> Stencil for T {}

/// Neighbour of `flat` shifted by `off` along `axis`, wrapping on periodic axes.
fn shifted(grid: &GridSpec, axis: usize, flat: usize, i: usize, off: isize) -> Option<usize> {
    let a = grid.axis(axis);
    let n = a.n as isize;
    let mut j = i as isize + off;
    if a.periodic {
        j = j.rem_euclid(n);
    } else if j < 0 || j >= n {
        return None;
    }
    Some((flat as isize + (j - i as isize) * grid.stride(axis) as isize) as usize)
}

fn node_index(grid: &GridSpec, axis: usize, flat: usize) -> usize {
    (flat / grid.stride(axis)) % grid.axis(axis).n
}

/// Centered second-order first derivative; one-sided second order at
/// non-periodic boundaries.
pub fn first_derivative<T: Stencil>(v: &[T], grid: &GridSpec, axis: usize, flat: usize) -> T {
    let h = grid.axis(axis).spacing();
    let i = node_index(grid, axis, flat);
    let at = |off| v[shifted(grid, axis, flat, i, off).expect("stencil inside grid")];
    match (shifted(grid, axis, flat, i, -1), shifted(grid, axis, flat, i, 1)) {
        (Some(m), Some(p)) => (v[p] - v[m]) * (0.5 / h),
        (None, _) => (at(1) * 4.0 - v[flat] * 3.0 - at(2)) * (0.5 / h),
        (_, None) => (v[flat] * 3.0 - at(-1) * 4.0 + at(-2)) * (0.5 / h),
    }
}

/// Centered second-order second derivative; one-sided second order
/// `(2, −5, 4, −1)/h²` at non-periodic boundaries.
pub fn second_derivative<T: Stencil>(v: &[T], grid: &GridSpec, axis: usize, flat: usize) -> T {
    let h = grid.axis(axis).spacing();
    let i = node_index(grid, axis, flat);
    let at = |off| v[shifted(grid, axis, flat, i, off).expect("stencil inside grid")];
    let c = 1.0 / (h * h);
    match (shifted(grid, axis, flat, i, -1), shifted(grid, axis, flat, i, 1)) {
        (Some(m), Some(p)) => (v[p] + v[m] - v[flat] * 2.0) * c,
        (None, _) => (v[flat] * 2.0 - at(1) * 5.0 + at(2) * 4.0 - at(3)) * c,
        (_, None) => (v[flat] * 2.0 - at(-1) * 5.0 + at(-2) * 4.0 - at(-3)) * c,
    }
}

/// Spatial Laplacian at one node.
pub fn laplacian<T: Stencil>(v: &[T], grid: &GridSpec, flat: usize) -> T {
    let mut acc = second_derivative(v, grid, 0, flat);
    for axis in 1..grid.dims() {
        acc = acc + second_derivative(v, grid, axis, flat);
    }
    acc
}

/// How `∂t² a` enters the quantum potential.
#[derive(Debug, Clone, Copy)]
pub enum TimeCurvature<'a> {
    /// Time-independent amplitude: `∂t² a = 0`.
    Static,
    /// Centered difference over three slices `prev, a, next` spaced by `dt`.
    Slices { prev: &'a RealField, next: &'a RealField, dt: f64 },
}

/// Real field with a per-node validity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedField {
    pub field: RealField,
    pub valid: Vec<bool>,
}

impl MaskedField {
    /// `(value, valid)` at node `i`.
    pub fn get(&self, i: usize) -> Option<f64> {
        self.valid[i].then(|| self.field.values[i])
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }
}

/// Quantum potential `Q = (∂t² − ∇²)a / a`.
///
/// Nodes with `a` at or below the amplitude floor are flagged invalid and
/// carry NaN.
pub fn quantum_potential(a: &RealField, time: TimeCurvature<'_>) -> Result<MaskedField, SpacetimeError> {
    if let TimeCurvature::Slices { prev, next, dt } = time {
        if prev.grid != a.grid || next.grid != a.grid {
            return Err(SpacetimeError::GridMismatch);
        }
        if !(dt > 0.0) {
            return Err(SpacetimeError::InvalidGrid(format!("slice spacing must be positive, got {dt}")));
        }
    }
    let grid = &a.grid;
    let floor = AMPLITUDE_FLOOR_REL * a.max_abs();
    let mut values = vec![f64::NAN; grid.len()];
    let mut valid = vec![false; grid.len()];
    for i in 0..grid.len() {
        let ai = a.values[i];
        if !(ai > floor) {
            continue;
        }
        let att = match time {
            TimeCurvature::Static => 0.0,
            TimeCurvature::Slices { prev, next, dt } => {
                (next.values[i] - 2.0 * ai + prev.values[i]) / (dt * dt)
            }
        };
        values[i] = (att - laplacian(&a.values, grid, i)) / ai;
        valid[i] = true;
    }
    Ok(MaskedField { field: RealField { grid: grid.clone(), values, time_label: a.time_label }, valid })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> GridSpec {
        GridSpec::line(0.0, 6.0, n, false, 0.1).unwrap()
    }

    #[test]
    fn cosine_amplitude_gives_k_squared() {
        // Periodic cos(x) on one full period: exact up to discretization.
        let g = GridSpec::line(-1.0, 1.0, 64, true, 0.1).unwrap();
        let k = std::f64::consts::PI;
        let a = RealField::from_fn(g, 0.0, |p| (k * p[0]).cos());
        let q = quantum_potential(&a, TimeCurvature::Static).unwrap();
        let h = 2.0 / 64.0;
        let discrete = (2.0 - 2.0 * (k * h).cos()) / (h * h);
        for i in 0..64 {
            if let Some(v) = q.get(i) {
                if a.values[i].abs() > 1e-3 {
                    assert!((v - discrete).abs() < 1e-8 * discrete, "{v}");
                }
            }
        }
    }

    #[test]
    fn exponential_amplitude_gives_minus_kappa_squared() {
        let a = RealField::from_fn(line(241), 0.0, |p| (0.5 * p[0]).exp());
        let q = quantum_potential(&a, TimeCurvature::Static).unwrap();
        assert_eq!(q.valid_count(), 241);
        for &v in &q.field.values {
            assert!((v + 0.25).abs() < 1e-3, "{v}");
        }
    }

    #[test]
    fn constant_amplitude_has_no_potential() {
        let a = RealField::from_fn(line(16), 0.0, |_| 3.0);
        let q = quantum_potential(&a, TimeCurvature::Static).unwrap();
        assert!(q.field.values.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn zero_amplitude_is_flagged() {
        let a = RealField::from_fn(line(16), 0.0, |p| if p[0] < 3.0 { 0.0 } else { 1.0 });
        let q = quantum_potential(&a, TimeCurvature::Static).unwrap();
        assert!(!q.valid[0] && q.field.values[0].is_nan());
    }
}
