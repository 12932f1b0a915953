use super::SpacetimeError;

/// One uniformly sampled axis.
///
/// A non-periodic axis has nodes at both `min` and `max`. A periodic axis
/// identifies `max` with `min`, so its nodes stop one spacing short of `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
    pub periodic: bool,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize, periodic: bool) -> Self {
        Self { min, max, n, periodic }
    }

    pub fn spacing(&self) -> f64 {
        if self.periodic {
            (self.max - self.min) / self.n as f64
        } else {
            (self.max - self.min) / (self.n - 1) as f64
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.min + i as f64 * self.spacing()
    }

    pub fn length(&self) -> f64 {
        self.max - self.min
    }

    /// Fractional node index of coordinate `x`; periodic axes are wrapped into `[0, n)`.
    pub fn fractional_index(&self, x: f64) -> f64 {
        let s = (x - self.min) / self.spacing();
        if self.periodic {
            s.rem_euclid(self.n as f64)
        } else {
            s
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    fn validate(&self) -> Result<(), SpacetimeError> {
        if self.n < 8 {
            return Err(SpacetimeError::InvalidGrid(format!("axis needs n >= 8, got {}", self.n)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(SpacetimeError::InvalidGrid(format!(
                "axis extent [{}, {}] is not an increasing finite interval",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Uniform grid of one to three axes plus a time step. Values are stored
/// row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<Axis>,
    dt: f64,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>, dt: f64) -> Result<Self, SpacetimeError> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(SpacetimeError::InvalidGrid(format!("dims must be 1..=3, got {}", axes.len())));
        }
        for a in &axes {
            a.validate()?;
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SpacetimeError::InvalidGrid(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { axes, dt })
    }

    pub fn line(min: f64, max: f64, n: usize, periodic: bool, dt: f64) -> Result<Self, SpacetimeError> {
        Self::new(vec![Axis::new(min, max, n, periodic)], dt)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn with_dt(&self, dt: f64) -> Result<Self, SpacetimeError> {
        Self::new(self.axes.clone(), dt)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major stride of axis `k`.
    pub fn stride(&self, k: usize) -> usize {
        self.axes[k + 1..].iter().map(|a| a.n).product()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().enumerate().map(|(k, &i)| i * self.stride(k)).sum()
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for k in (0..self.dims()).rev() {
            let n = self.axes[k].n;
            out[k] = flat % n;
            flat /= n;
        }
        out
    }

    /// Coordinates of node `flat`; unused trailing entries are zero.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut p = [0.0; 3];
        for (k, a) in self.axes.iter().enumerate() {
            p[k] = a.coord(idx[k]);
        }
        p
    }

    /// Volume element of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing()).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_degenerate_axes() {
        assert!(GridSpec::line(0.0, 1.0, 7, false, 0.1).is_err());
        assert!(GridSpec::line(1.0, 1.0, 16, false, 0.1).is_err());
        assert!(GridSpec::line(0.0, 1.0, 16, false, 0.0).is_err());
        assert!(GridSpec::new(vec![], 0.1).is_err());
    }

    #[test]
    fn spacing_and_indexing() {
        let g = GridSpec::new(
            vec![Axis::new(0.0, 1.0, 11, false), Axis::new(0.0, 2.0, 8, true)],
            0.1,
        )
        .unwrap();
        assert!((g.axis(0).spacing() - 0.1).abs() < 1e-15);
        assert!((g.axis(1).spacing() - 0.25).abs() < 1e-15);
        let f = g.flat_index(&[3, 5]);
        assert_eq!(f, 29);
        assert_eq!(&g.multi_index(f)[..2], &[3, 5]);
        let p = g.point(f);
        assert!((p[0] - 0.3).abs() < 1e-15 && (p[1] - 1.25).abs() < 1e-15);
        assert!((g.axis(1).fractional_index(2.25) - 1.0).abs() < 1e-12);
    }
}
