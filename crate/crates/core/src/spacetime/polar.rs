use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::{ComplexScalarField, RealField, SpacetimeError, AMPLITUDE_FLOOR_REL};

/// Amplitude/phase split of a complex field with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField {
    pub amplitude: RealField,
    /// Unwrapped phase; entries where `valid` is false hold the raw wrapped
    /// phase and must not be trusted.
    pub phase: RealField,
    pub valid: Vec<bool>,
    /// Absolute amplitude threshold used for `valid`.
    pub floor: f64,
}

impl PolarField {
    pub fn recompose(&self, i: usize) -> Complex64 {
        Complex64::from_polar(self.amplitude.values[i], self.phase.values[i])
    }
}

/// Splits `f = a·e^{iφ}` and unwraps φ along grid lines.
///
/// Lines are unwrapped hierarchically: the first axis along its base line,
/// then each later axis starting from the already unwrapped base. Points
/// below the amplitude floor are skipped and marked invalid.
pub fn polar_decompose(f: &ComplexScalarField) -> Result<PolarField, SpacetimeError> {
    let grid = &f.grid;
    let amp: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
    let amax = amp.iter().cloned().fold(0.0, f64::max);
    if !(amax > 0.0) {
        return Err(SpacetimeError::NoPhase);
    }
    let floor = AMPLITUDE_FLOOR_REL * amax;
    let valid: Vec<bool> = amp.iter().map(|&a| a > floor).collect();
    let raw: Vec<f64> = f.values.iter().map(|v| v.arg()).collect();
    let reference = raw[valid.iter().position(|&v| v).expect("amax > 0 implies a valid point")];

    let mut phase = raw.clone();
    let mut done = vec![false; grid.len()];
    let dims = grid.dims();
    for axis in 0..dims {
        let n = grid.axis(axis).n;
        let stride = grid.stride(axis);
        // Line starts: every node whose index is zero on `axis` and on all later axes.
        for start in 0..grid.len() {
            let idx = grid.multi_index(start);
            if idx[axis..dims].iter().any(|&i| i != 0) {
                continue;
            }
            let mut last: Option<f64> = if done[start] && valid[start] { Some(phase[start]) } else { None };
            for s in 0..n {
                let i = start + s * stride;
                if !valid[i] {
                    continue;
                }
                if done[i] && s == 0 {
                    last = Some(phase[i]);
                    continue;
                }
                let target = last.unwrap_or(reference);
                let p = unwrap_near(raw[i], target);
                phase[i] = p;
                done[i] = true;
                last = Some(p);
            }
        }
    }
    Ok(PolarField {
        amplitude: RealField { grid: grid.clone(), values: amp, time_label: f.time_label },
        phase: RealField { grid: grid.clone(), values: phase, time_label: f.time_label },
        valid,
        floor,
    })
}

/// The representative of `raw` modulo 2π closest to `target`.
pub(crate) fn unwrap_near(raw: f64, target: f64) -> f64 {
    let d = raw - target;
    raw - TAU * ((d + PI) / TAU).floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::GridSpec;

    #[test]
    fn constant_field() {
        let g = GridSpec::line(0.0, 1.0, 16, false, 0.1).unwrap();
        let f = ComplexScalarField::from_fn(g, 0.0, |_| Complex64::new(1.0, 0.0));
        let p = polar_decompose(&f).unwrap();
        assert!(p.amplitude.values.iter().all(|&a| (a - 1.0).abs() < 1e-15));
        assert!(p.phase.values.iter().all(|&a| a.abs() < 1e-15));
    }

    #[test]
    fn plane_wave_unwraps_monotonically() {
        let g = GridSpec::line(0.0, 10.0, 401, false, 0.1).unwrap();
        let f = ComplexScalarField::from_fn(g, 0.0, |p| Complex64::from_polar(1.0, 2.0 * p[0]));
        let p = polar_decompose(&f).unwrap();
        let ph = &p.phase.values;
        assert!(ph.windows(2).all(|w| w[1] > w[0]));
        assert!((ph[400] - ph[0] - 20.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_has_no_phase() {
        let g = GridSpec::line(0.0, 1.0, 16, false, 0.1).unwrap();
        let f = ComplexScalarField::from_fn(g, 0.0, |_| Complex64::new(0.0, 0.0));
        assert_eq!(polar_decompose(&f).unwrap_err(), SpacetimeError::NoPhase);
    }

    #[test]
    fn node_is_masked() {
        let g = GridSpec::line(-1.0, 1.0, 21, false, 0.1).unwrap();
        let f = ComplexScalarField::from_fn(g, 0.0, |p| Complex64::new(p[0], 0.0));
        let p = polar_decompose(&f).unwrap();
        assert!(!p.valid[10]);
        assert!(p.valid.iter().filter(|v| !**v).count() == 1);
    }
}
