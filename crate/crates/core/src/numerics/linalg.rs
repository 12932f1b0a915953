//! Pre-factorized complex tridiagonal systems, optionally cyclic.

use num_complex::Complex64;

/// LU factors of a tridiagonal matrix with sub-diagonal `a`, diagonal `b`
/// and super-diagonal `c`. In cyclic mode the corners `A[0][n−1] = a[0]` and
/// `A[n−1][0] = c[n−1]` are handled by a Sherman–Morrison correction.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    a: Vec<Complex64>,
    cp: Vec<Complex64>,
    inv: Vec<Complex64>,
    cyclic: Option<CyclicCorrection>,
}

#[derive(Debug, Clone)]
struct CyclicCorrection {
    z: Vec<Complex64>,
    beta: Complex64,
    gamma: Complex64,
    denom: Complex64,
}

impl Tridiagonal {
    /// Factorizes the system; `a[0]` and `c[n−1]` are used only when `cyclic`.
    pub fn new(a: &[Complex64], b: &[Complex64], c: &[Complex64], cyclic: bool) -> Self {
        let n = b.len();
        assert!(n >= 3 && a.len() == n && c.len() == n, "tridiagonal system needs n >= 3 and equal lengths");
        let mut bb = b.to_vec();
        let (beta, alpha, gamma) = (a[0], c[n - 1], -b[0]);
        if cyclic {
            bb[0] -= gamma;
            bb[n - 1] -= alpha * beta / gamma;
        }
        let mut cp = vec![Complex64::new(0.0, 0.0); n];
        let mut inv = vec![Complex64::new(0.0, 0.0); n];
        inv[0] = 1.0 / bb[0];
        cp[0] = c[0] * inv[0];
        for i in 1..n {
            inv[i] = 1.0 / (bb[i] - a[i] * cp[i - 1]);
            cp[i] = c[i] * inv[i];
        }
        let mut out = Self { a: a.to_vec(), cp, inv, cyclic: None };
        if cyclic {
            let mut z = vec![Complex64::new(0.0, 0.0); n];
            z[0] = gamma;
            z[n - 1] = alpha;
            out.thomas(&mut z, 1);
            let denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
            out.cyclic = Some(CyclicCorrection { z, beta, gamma, denom });
        }
        out
    }

    pub fn len(&self) -> usize {
        self.inv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv.is_empty()
    }

    fn thomas(&self, d: &mut [Complex64], lanes: usize) {
        let n = self.len();
        for v in &mut d[..lanes] {
            *v *= self.inv[0];
        }
        for i in 1..n {
            let (head, tail) = d.split_at_mut(i * lanes);
            let prev = &head[(i - 1) * lanes..];
            let (a, inv) = (self.a[i], self.inv[i]);
            for (v, p) in tail[..lanes].iter_mut().zip(prev) {
                *v = (*v - a * p) * inv;
            }
        }
        for i in (0..n - 1).rev() {
            let (head, tail) = d.split_at_mut((i + 1) * lanes);
            let cur = &mut head[i * lanes..];
            let cp = self.cp[i];
            for (v, nx) in cur.iter_mut().zip(&tail[..lanes]) {
                *v -= cp * nx;
            }
        }
    }

    /// Overwrites `d` with the solution of `A x = d`.
    pub fn solve_in_place(&self, d: &mut [Complex64]) {
        assert_eq!(d.len(), self.len());
        self.solve_lanes(d, 1);
    }

    /// Solves `lanes` independent systems sharing this matrix. Row `i` of
    /// lane `l` is stored at `d[i·lanes + l]`.
    pub fn solve_lanes(&self, d: &mut [Complex64], lanes: usize) {
        let n = self.len();
        assert_eq!(d.len(), n * lanes);
        self.thomas(d, lanes);
        if let Some(cc) = &self.cyclic {
            for l in 0..lanes {
                let fact = (d[l] + cc.beta * d[(n - 1) * lanes + l] / cc.gamma) / cc.denom;
                for (i, z) in cc.z.iter().enumerate() {
                    d[i * lanes + l] -= fact * z;
                }
            }
        }
    }
}

/// Least-squares solution of `A x ≈ y` for a tall matrix given by columns,
/// via modified Gram–Schmidt. Returns `None` when the columns are dependent.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let m = columns.len();
    let mut q: Vec<Vec<f64>> = columns.to_vec();
    let mut r = vec![vec![0.0; m]; m];
    for j in 0..m {
        for k in 0..j {
            let d: f64 = q[k].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[k][j] = d;
            let qk = q[k].clone();
            for (v, u) in q[j].iter_mut().zip(&qk) {
                *v -= d * u;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = columns[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-13 * scale) {
            return None;
        }
        r[j][j] = norm;
        for v in &mut q[j] {
            *v /= norm;
        }
    }
    let mut x: Vec<f64> = q.iter().map(|qj| qj.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    for j in (0..m).rev() {
        for k in j + 1..m {
            x[j] -= r[j][k] * x[k];
        }
        x[j] /= r[j][j];
    }
    Some(x)
}
