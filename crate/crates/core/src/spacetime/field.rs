use num_complex::Complex64;

use super::{GridSpec, SpacetimeError};

/// Complex samples on a grid at a single time.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexScalarField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
    pub time_label: f64,
}

impl ComplexScalarField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>, time_label: f64) -> Result<Self, SpacetimeError> {
        if values.len() != grid.len() {
            return Err(SpacetimeError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values, time_label })
    }

    /// Samples `f` at every node; `f` receives the node coordinates.
    pub fn from_fn(grid: GridSpec, time_label: f64, mut f: impl FnMut([f64; 3]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, values, time_label }
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn density(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
            time_label: self.time_label,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Real samples on a grid at a single time.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub time_label: f64,
}

impl RealField {
    pub fn new(grid: GridSpec, values: Vec<f64>, time_label: f64) -> Result<Self, SpacetimeError> {
        if values.len() != grid.len() {
            return Err(SpacetimeError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values, time_label })
    }

    pub fn from_fn(grid: GridSpec, time_label: f64, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, values, time_label }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}
