use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};
use crate::tolerance;

/// A finite complex vector of dimension at least one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(i) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { entries })
    }

    /// Builds from real amplitudes.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![ZERO; dim])
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit vector along `self`; fails on a (numerically) zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < tolerance::STRUCTURAL {
            return Err(Error::NotNormalized(n));
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_vec_unchecked(self.entries.iter().map(|z| z * c).collect())
    }

    pub fn conj(&self) -> Self {
        Self::from_vec_unchecked(self.entries.iter().map(|z| z.conj()).collect())
    }

    /// `|self><other|`.
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        assert_eq!(self.dim(), other.dim(), "outer product of unequal dims");
        let d = self.dim();
        ComplexMatrix::from_fn(d, |i, j| self.entries[i] * other.entries[j].conj())
    }

    /// `|self><self|`.
    pub fn projector(&self) -> ComplexMatrix {
        self.outer(self)
    }

    pub fn distance(&self, other: &ComplexVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn check_same_dim(&self, other: &ComplexVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &ComplexVector) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self::from_vec_unchecked(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + c * b)
                .collect(),
        ))
    }
}

impl TryFrom<Vec<Complex64>> for ComplexVector {
    type Error = Error;
    fn try_from(entries: Vec<Complex64>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<ComplexVector> for Vec<Complex64> {
    fn from(v: ComplexVector) -> Self {
        v.entries
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        self.add_scaled(Complex64::new(1.0, 0.0), rhs)
            .expect("vector addition of unequal dims")
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        self.add_scaled(Complex64::new(-1.0, 0.0), rhs)
            .expect("vector subtraction of unequal dims")
    }
}

impl Mul<&ComplexVector> for Complex64 {
    type Output = ComplexVector;
    fn mul(self, rhs: &ComplexVector) -> ComplexVector {
        rhs.scale(self)
    }
}

/// Computational basis vector `e_index` in dimension `dim`.
pub fn basis_vector(dim: usize, index: usize) -> Result<ComplexVector> {
    if index >= dim {
        return Err(Error::InvalidParameter(format!(
            "basis index {index} out of range for dimension {dim}"
        )));
    }
    let mut v = ComplexVector::zeros(dim)?;
    v.entries[index] = Complex64::new(1.0, 0.0);
    Ok(v)
}

/// `<u|v>`, conjugate-linear in `u`.
pub fn inner(u: &ComplexVector, v: &ComplexVector) -> Result<Complex64> {
    u.check_same_dim(v)?;
    Ok(u.entries
        .iter()
        .zip(&v.entries)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
pub fn gram_schmidt(vs: &[ComplexVector]) -> Result<Vec<ComplexVector>> {
    let mut out: Vec<ComplexVector> = Vec::with_capacity(vs.len());
    for (index, v) in vs.iter().enumerate() {
        if let Some(first) = vs.first() {
            first.check_same_dim(v)?;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = inner(q, &w)?;
                w = w.add_scaled(-c, q)?;
            }
        }
        let residual = w.norm();
        if residual < tolerance::RANK {
            return Err(Error::RankDeficient { index, residual });
        }
        out.push(w.scale(Complex64::new(1.0 / residual, 0.0)));
    }
    Ok(out)
}

/// Kronecker product `a ⊗ b`; index `i * dim(b) + j`.
pub fn tensor(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    let entries = a
        .entries
        .iter()
        .flat_map(|x| b.entries.iter().map(move |y| x * y))
        .collect();
    ComplexVector::from_vec_unchecked(entries)
}

/// Reduced state of the B factor: traces out A from `psi ∈ H_A ⊗ H_B`.
pub fn partial_trace_a(psi: &ComplexVector, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if psi.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            actual: psi.dim(),
        });
    }
    let e = &psi.entries;
    Ok(ComplexMatrix::from_fn(dim_b, |j, k| {
        (0..dim_a)
            .map(|i| e[i * dim_b + j] * e[i * dim_b + k].conj())
            .sum()
    }))
}
