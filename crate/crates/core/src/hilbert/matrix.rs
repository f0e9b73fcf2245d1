use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexVector, ONE, ZERO};
use crate::error::{Error, Result};

/// Square complex matrix, row-major. Serialized as a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Complex64>>", into = "Vec<Vec<Complex64>>")]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<ComplexVector>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    len: row.len(),
                });
            }
            data.extend(row);
        }
        if let Some(i) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { dim, data })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Matrix whose columns are `cols`.
    pub fn from_columns(cols: &[ComplexVector]) -> Result<Self> {
        let dim = cols.len();
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(c) = cols.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: c.dim(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| cols[j][i]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from_vec_unchecked((0..self.dim).map(|i| self.get(i, j)).collect())
    }

    pub fn columns(&self) -> Vec<ComplexVector> {
        (0..self.dim).map(|j| self.column(j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.dim).map(<[_]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let d = self.dim;
        Ok(Self::from_fn(d, |i, j| {
            (0..d).map(|k| self.get(i, k) * other.get(k, j)).sum()
        }))
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.dim(),
            });
        }
        let d = self.dim;
        Ok(ComplexVector::from_vec_unchecked(
            (0..d)
                .map(|i| (0..d).map(|k| self.get(i, k) * v[k]).sum())
                .collect(),
        ))
    }

    /// `<psi|self|psi>`.
    pub fn expectation(&self, psi: &ComplexVector) -> Result<Complex64> {
        let m = self.mul_vec(psi)?;
        super::inner(psi, &m)
    }

    pub fn try_add_scaled(&self, c: Complex64, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Eigen-decomposition of the Hermitian part `(A + A†)/2`.
    pub fn eigen_hermitian(&self) -> HermitianEigen {
        let d = self.dim;
        let m = DMatrix::from_fn(d, d, |i, j| 0.5 * (self.get(i, j) + self.get(j, i).conj()));
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = order
            .iter()
            .map(|&k| {
                ComplexVector::from_vec_unchecked(
                    (0..d).map(|i| eig.eigenvectors[(i, k)]).collect(),
                )
            })
            .collect();
        HermitianEigen { values, vectors }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen_hermitian().values[0]
    }
}

impl TryFrom<Vec<Vec<Complex64>>> for ComplexMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<ComplexMatrix> for Vec<Vec<Complex64>> {
    fn from(m: ComplexMatrix) -> Self {
        m.rows()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add_scaled(ONE, rhs).expect("matrix addition of unequal dims")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add_scaled(-ONE, rhs)
            .expect("matrix subtraction of unequal dims")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product of unequal dims")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_must_be_square_and_finite() {
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(
            ComplexMatrix::from_rows(vec![vec![one, one], vec![one]]),
            Err(Error::NotSquare { .. })
        ));
        assert!(ComplexMatrix::from_rows(vec![]).is_err());
        assert!(ComplexMatrix::from_rows(vec![vec![Complex64::new(f64::INFINITY, 0.0)]]).is_err());
    }

    #[test]
    fn eigen_of_diagonal() {
        let m = ComplexMatrix::diagonal(&[0.7, 0.2, -1.0]);
        let eig = m.eigen_hermitian();
        assert_eq!(eig.values.len(), 3);
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[2] - 0.7).abs() < 1e-14);
        assert!((eig.vectors[2][0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_reconstructs_complex_hermitian() {
        let i = Complex64::new(0.0, 1.0);
        let m = ComplexMatrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), 2.0 * i + 0.5],
            vec![-2.0 * i + 0.5, Complex64::new(-0.5, 0.0)],
        ])
        .unwrap();
        let eig = m.eigen_hermitian();
        let mut rebuilt = ComplexMatrix::zeros(2);
        for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
            rebuilt = &rebuilt + &v.projector().scale(Complex64::new(*lambda, 0.0));
        }
        assert!(rebuilt.frobenius_distance(&m).unwrap() < 1e-13);
    }

    #[test]
    fn serde_uses_row_major_re_im_pairs() {
        let m = ComplexMatrix::from_fn(2, |i, j| Complex64::new(i as f64, j as f64));
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[[0.0,0.0],[0.0,1.0]],[[1.0,0.0],[1.0,1.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
