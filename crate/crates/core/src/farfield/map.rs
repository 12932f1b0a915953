use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{u_field_point, FarFieldError, FieldQuery, Parts, WorldlineSource};
use crate::output::RunMeta;
use crate::spacetime::{write_complex, write_real, Axis, ComplexScalarField, FourVector, GridSpec, RealField};

const COMPONENT: [&str; 4] = ["t", "x", "y", "z"];

/// A rectangular 2D window in spacetime. Each axis varies one coordinate
/// (0 = t, 1..=3 = x, y, z) of `origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapWindow {
    pub origin: FourVector,
    pub axes: [(usize, Axis); 2],
}

impl MapWindow {
    /// `(t, x)` window at fixed `y = z = 0`.
    pub fn t_x(t: (f64, f64, usize), x: (f64, f64, usize)) -> Self {
        Self {
            origin: FourVector::new(0.0, 0.0, 0.0, 0.0),
            axes: [(0, Axis::new(t.0, t.1, t.2, false)), (1, Axis::new(x.0, x.1, x.2, false))],
        }
    }

    /// Spatial `(x, y)` window on the hyperplane `t = t0`, `z = 0`.
    pub fn hyperplane_x_y(t0: f64, x: (f64, f64, usize), y: (f64, f64, usize)) -> Self {
        Self {
            origin: FourVector::new(t0, 0.0, 0.0, 0.0),
            axes: [(1, Axis::new(x.0, x.1, x.2, false)), (2, Axis::new(y.0, y.1, y.2, false))],
        }
    }

    fn point(&self, i: usize, j: usize) -> FourVector {
        let mut a = self.origin.to_array();
        a[self.axes[0].0] = self.axes[0].1.coord(i);
        a[self.axes[1].0] = self.axes[1].1.coord(j);
        FourVector::from_array(a)
    }

    fn label(&self) -> String {
        let o = self.origin;
        format!(
            "axes={}{};origin={},{},{},{}",
            COMPONENT[self.axes[0].0], COMPONENT[self.axes[1].0], o.t, o.x, o.y, o.z
        )
    }
}

/// Sampled far fields over a window. Points where any source refuses the
/// far-field formula hold NaN and are cleared in `valid`.
#[derive(Debug, Clone)]
pub struct FieldMap {
    pub window: MapWindow,
    pub symmetric: ComplexScalarField,
    pub retarded: ComplexScalarField,
    pub advanced: ComplexScalarField,
    pub valid: Vec<bool>,
}

impl FieldMap {
    pub fn grid(&self) -> &GridSpec {
        &self.symmetric.grid
    }

    /// Pointwise `self − other` of one part, NaN where either is invalid.
    pub fn difference(&self, other: &FieldMap, part: impl Fn(&FieldMap) -> &ComplexScalarField) -> ComplexScalarField {
        let (a, b) = (part(self), part(other));
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
        ComplexScalarField { grid: a.grid.clone(), values, time_label: a.time_label }
    }
}

/// Evaluates the requested parts of the summed field of `sources` at every
/// window point. Parts not requested are stored as NaN.
pub fn field_map(sources: &[WorldlineSource], window: &MapWindow, parts: Parts) -> Result<FieldMap, FarFieldError> {
    if sources.is_empty() {
        return Err(FarFieldError::Invalid("field map needs at least one source".into()));
    }
    let [(ca, a0), (cb, a1)] = &window.axes;
    if ca == cb || *ca > 3 || *cb > 3 {
        return Err(FarFieldError::Invalid("map axes must be two distinct coordinates".into()));
    }
    let grid = GridSpec::new(vec![*a0, *a1], 1.0)?;
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let values: Vec<(Complex64, Complex64, Complex64, bool)> = (0..a0.n * a1.n)
        .into_par_iter()
        .map(|flat| {
            let x = window.point(flat / a1.n, flat % a1.n);
            let mut acc = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), true);
            for s in sources {
                match u_field_point(s, &FieldQuery::new(x, parts)) {
                    Ok(v) => {
                        acc.0 += v.symmetric.unwrap_or(nan);
                        acc.1 += v.retarded.unwrap_or(nan);
                        acc.2 += v.advanced.unwrap_or(nan);
                    }
                    Err(_) => return (nan, nan, nan, false),
                }
            }
            acc
        })
        .collect();
    let label = window.origin.t;
    let part = |f: fn(&(Complex64, Complex64, Complex64, bool)) -> Complex64| ComplexScalarField {
        grid: grid.clone(),
        values: values.iter().map(f).collect(),
        time_label: label,
    };
    Ok(FieldMap {
        window: window.clone(),
        symmetric: part(|v| v.0),
        retarded: part(|v| v.1),
        advanced: part(|v| v.2),
        valid: values.iter().map(|v| v.3).collect(),
    })
}

/// Writes `<stem>_u_sym.dslab`, `_u_ret`, `_u_adv` and the 0/1 validity
/// mask `_valid` into `dir`. Returns the written paths.
pub fn write_field_map(dir: &Path, stem: &str, map: &FieldMap, meta: &RunMeta) -> Result<Vec<PathBuf>, FarFieldError> {
    let io = |e: crate::spacetime::SpacetimeError| FarFieldError::Invalid(e.to_string());
    let base = format!("{};{}", meta.key_values().replace(',', ";"), map.window.label());
    let mut out = Vec::new();
    for (name, f) in [("u_sym", &map.symmetric), ("u_ret", &map.retarded), ("u_adv", &map.advanced)] {
        let path = dir.join(format!("{stem}_{name}.dslab"));
        let mut w = BufWriter::new(File::create(&path).map_err(|e| FarFieldError::Invalid(e.to_string()))?);
        write_complex(&mut w, f, &format!("{base};part={name}")).map_err(io)?;
        out.push(path);
    }
    let mask = RealField {
        grid: map.grid().clone(),
        values: map.valid.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect(),
        time_label: map.symmetric.time_label,
    };
    let path = dir.join(format!("{stem}_valid.dslab"));
    let mut w = BufWriter::new(File::create(&path).map_err(|e| FarFieldError::Invalid(e.to_string()))?);
    write_real(&mut w, &mask, &format!("{base};part=valid")).map_err(io)?;
    out.push(path);
    Ok(out)
}
