use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};
use crate::tolerance;

/// Point of the Bloch ball. Pure qubit states sit on the unit sphere; the
/// north pole `(0, 0, 1)` is `e0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub const ORIGIN: BlochPoint = BlochPoint { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm()
    }

    /// `a * p + b * q`.
    pub fn combine(a: f64, p: Self, b: f64, q: Self) -> Self {
        p.scale(a) + q.scale(b)
    }
}

impl std::ops::Add for BlochPoint {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for BlochPoint {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// Bloch vector of a qubit state: `(2 Re(a* b), 2 Im(a* b), |a|^2 - |b|^2)`.
pub fn bloch_map(psi: &ComplexVector) -> Result<BlochPoint> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: psi.dim(),
        });
    }
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > tolerance::DERIVED {
        return Err(Error::NotNormalized(n.sqrt()));
    }
    let (a, b) = (psi[0], psi[1]);
    let c = a.conj() * b;
    Ok(BlochPoint::new(2.0 * c.re, 2.0 * c.im, a.norm_sqr() - b.norm_sqr()))
}

/// Density matrix `(I + x X + y Y + z Z) / 2` of a point in the ball.
pub fn bloch_inverse(p: BlochPoint) -> Result<ComplexMatrix> {
    let r = p.norm();
    if r > 1.0 + tolerance::DERIVED {
        return Err(Error::OutsideBall(r));
    }
    Ok(ComplexMatrix::from_rows(vec![
        vec![Complex64::new(0.5 * (1.0 + p.z), 0.0), Complex64::new(0.5 * p.x, -0.5 * p.y)],
        vec![Complex64::new(0.5 * p.x, 0.5 * p.y), Complex64::new(0.5 * (1.0 - p.z), 0.0)],
    ])
    .expect("2x2 rows"))
}

/// A unit vector whose Bloch point is `p`, which must lie on the sphere.
pub fn state_from_bloch(p: BlochPoint) -> Result<ComplexVector> {
    let r = p.norm();
    if (r - 1.0).abs() > tolerance::DERIVED {
        return Err(Error::NotNormalized(r));
    }
    let p = p.scale(1.0 / r);
    // Pick the column of 2ρ with the larger diagonal entry to stay well-conditioned.
    let v = if p.z >= 0.0 {
        vec![Complex64::new(1.0 + p.z, 0.0), Complex64::new(p.x, p.y)]
    } else {
        vec![Complex64::new(p.x, -p.y), Complex64::new(1.0 - p.z, 0.0)]
    };
    ComplexVector::from_vec_unchecked(v).normalized()
}
