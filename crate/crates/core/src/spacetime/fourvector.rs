use std::ops::{Add, Mul, Neg, Sub};

use super::SpacetimeError;

/// Contravariant spacetime point or displacement `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const ZERO: FourVector = FourVector { t: 0.0, x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn spatial(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Minkowski square `t² − |x|²`.
    pub fn square(self) -> f64 {
        minkowski_dot(self, self)
    }

    /// Flips the sign of the spatial part, i.e. raises or lowers the index.
    pub fn dual(self) -> Self {
        Self::new(self.t, -self.x, -self.y, -self.z)
    }

    pub fn euclidean_norm(self) -> f64 {
        (self.t * self.t + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for FourVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for FourVector {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

/// `a.t·b.t − a.x·b.x − a.y·b.y − a.z·b.z`.
pub fn minkowski_dot(a: FourVector, b: FourVector) -> f64 {
    a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z
}

/// Components of `p` in a frame moving with velocity `v` along +x.
pub fn boost_x(p: FourVector, v: f64) -> Result<FourVector, SpacetimeError> {
    if !(v.abs() < 1.0) {
        return Err(SpacetimeError::Superluminal(v));
    }
    let gamma = 1.0 / (1.0 - v * v).sqrt();
    Ok(FourVector::new(gamma * (p.t - v * p.x), gamma * (p.x - v * p.t), p.y, p.z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_examples() {
        let e0 = FourVector::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(e0, e0), 1.0);
        let n = FourVector::new(1.0, 1.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(n, n), 0.0);
        let g = 1.25;
        let u = FourVector::new(g, g * 0.6, 0.0, 0.0);
        assert!((u.square() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boost_examples() {
        let e0 = FourVector::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(boost_x(e0, 0.0).unwrap(), e0);
        let b = boost_x(e0, 0.6).unwrap();
        assert!((b.t - 1.25).abs() < 1e-15 && (b.x + 0.75).abs() < 1e-15);
        assert!((b.square() - 1.0).abs() < 1e-12);
        assert!(boost_x(e0, 1.0).is_err());
        assert!(boost_x(e0, f64::NAN).is_err());
    }
}
