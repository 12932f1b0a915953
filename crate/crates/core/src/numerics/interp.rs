//! Local polynomial interpolation on uniform grids.

use crate::spacetime::Axis;

/// Lagrange weights for nodes `−1, 0, 1, 2` at fractional offset `f ∈ [0, 1]`.
pub fn cubic_weights(f: f64) -> [f64; 4] {
    let fm1 = f - 1.0;
    let fm2 = f - 2.0;
    let fp1 = f + 1.0;
    [-f * fm1 * fm2 / 6.0, fp1 * fm1 * fm2 / 2.0, -fp1 * f * fm2 / 2.0, fp1 * f * fm1 / 6.0]
}

/// Four node indices and weights for cubic interpolation at `x` on `axis`.
///
/// Periodic axes wrap; open axes shift the stencil inward near the
/// boundary. Returns `None` outside the sampled interval.
pub fn stencil(axis: &Axis, x: f64) -> Option<([usize; 4], [f64; 4])> {
    let s = axis.fractional_index(x);
    let n = axis.n;
    if axis.periodic {
        let i0 = s.floor();
        let f = s - i0;
        let base = i0 as isize;
        let w = cubic_weights(f);
        let idx = [-1isize, 0, 1, 2].map(|o| (base + o).rem_euclid(n as isize) as usize);
        return Some((idx, w));
    }
    if !(s >= 0.0 && s <= (n - 1) as f64) {
        return None;
    }
    let base = (s.floor() as usize).clamp(1, n - 3);
    let f = s - base as f64;
    // Nodes base−1 … base+2 with offset f relative to `base`.
    let w = cubic_weights(f);
    Some(([base - 1, base, base + 1, base + 2], w))
}

/// Cubic Hermite interpolation between `(y0, d0)` at 0 and `(y1, d1)` at `h`.
pub fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, s: f64) -> (f64, f64) {
    let t = s / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * t2 - 6.0 * t) / h;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = (-6.0 * t2 + 6.0 * t) / h;
    let dh11 = 3.0 * t2 - 2.0 * t;
    (value, dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_exact_for_cubics() {
        let ax = Axis::new(0.0, 1.0, 11, false);
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        for &x in &[0.0, 0.03, 0.47, 0.95, 1.0] {
            let (idx, w) = stencil(&ax, x).unwrap();
            let v: f64 = idx.iter().zip(w).map(|(&i, w)| w * p(ax.coord(i))).sum();
            assert!((v - p(x)).abs() < 1e-13, "x={x}");
        }
        assert!(stencil(&ax, 1.01).is_none());
    }

    #[test]
    fn periodic_stencil_wraps() {
        let ax = Axis::new(0.0, 1.0, 16, true);
        let (idx, w) = stencil(&ax, 0.99).unwrap();
        assert_eq!(idx, [14, 15, 0, 1]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_reproduces_cubic() {
        let f = |s: f64| s * s * s - s;
        let df = |s: f64| 3.0 * s * s - 1.0;
        let (v, d) = hermite(f(1.0), df(1.0), f(1.5), df(1.5), 0.5, 0.2);
        assert!((v - f(1.2)).abs() < 1e-14 && (d - df(1.2)).abs() < 1e-13);
    }
}
