use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{gram_schmidt, ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary.
///
/// QR of a complex Ginibre matrix with R's diagonal made positive. Gram-Schmidt
/// on the columns yields exactly that Q, so it is used directly.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    loop {
        let cols: Vec<ComplexVector> = (0..d)
            .map(|_| ComplexVector::from_vec_unchecked((0..d).map(|_| complex_gaussian(rng)).collect()))
            .collect();
        // A singular Ginibre draw has probability zero; redraw if it happens.
        if let Ok(q) = gram_schmidt(&cols) {
            return ComplexMatrix::from_columns(&q);
        }
    }
}

/// Haar-uniform unit vector on the complex sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexVector> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    loop {
        let v = ComplexVector::from_vec_unchecked((0..d).map(|_| complex_gaussian(rng)).collect());
        if let Ok(u) = v.normalized() {
            return Ok(u);
        }
    }
}

/// Alias kept for the state-level vocabulary.
pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexVector> {
    random_unit_vector(d, rng)
}

/// Random Hermitian matrix `U diag(λ) U†` with Haar `U` and eigenvalues drawn
/// uniformly from `[lo, hi)`.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, lo: f64, hi: f64, rng: &mut R) -> Result<ComplexMatrix> {
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidParameter(format!("empty eigenvalue range [{lo}, {hi})")));
    }
    let u = haar_unitary(d, rng)?;
    let lambdas: Vec<f64> = (0..d).map(|_| rng.random_range(lo..hi)).collect();
    let m = &(&u * &ComplexMatrix::diagonal(&lambdas)) * &u.adjoint();
    // Exact Hermiticity.
    Ok(ComplexMatrix::from_fn(d, |i, j| 0.5 * (m.get(i, j) + m.get(j, i).conj())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_vector, inner};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unitarity_error(u: &ComplexMatrix) -> f64 {
        (&u.adjoint() * u)
            .max_abs_diff(&ComplexMatrix::identity(u.dim()))
            .unwrap()
    }

    #[test]
    fn haar_d1_is_a_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = haar_unitary(1, &mut rng).unwrap();
        assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_columns_orthonormal_and_deterministic() {
        let u = haar_unitary(3, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let cols = u.columns();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((inner(&cols[i], &cols[j]).unwrap() - expected).norm() < 1e-12);
            }
        }
        assert!(unitarity_error(&u) < 1e-12);
        let again = haar_unitary(3, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(u, again);
        assert!(haar_unitary(0, &mut ChaCha8Rng::seed_from_u64(7)).is_err());
    }

    #[test]
    fn haar_columns_survive_gram_schmidt() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=6 {
            let u = haar_unitary(d, &mut rng).unwrap();
            let cols = u.columns();
            let gs = gram_schmidt(&cols).unwrap();
            for (a, b) in cols.iter().zip(&gs) {
                assert!(a.distance(b) < 1e-10);
            }
        }
    }

    #[test]
    fn random_pure_is_unit_and_reproducible() {
        let a = random_pure(5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = random_pure(5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert_eq!(a, b);
    }

    #[test]
    fn random_pure_first_moment_matches_haar() {
        // E|<e0|psi>|^2 = 1/d for Haar psi.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let e0 = basis_vector(2, 0).unwrap();
        let n = 100_000;
        let mean = (0..n)
            .map(|_| inner(&e0, &random_pure(2, &mut rng).unwrap()).unwrap().norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn haar_is_left_invariant_in_distribution() {
        // |U_00|^2 and |(VU)_00|^2 share the Beta(1, d-1) law with mean 1/d.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = haar_unitary(3, &mut rng).unwrap();
        let n = 20_000;
        let (mut plain, mut rotated) = (0.0, 0.0);
        for _ in 0..n {
            let u = haar_unitary(3, &mut rng).unwrap();
            plain += u.get(0, 0).norm_sqr();
            rotated += (&v * &u).get(0, 0).norm_sqr();
        }
        assert!((plain / n as f64 - 1.0 / 3.0).abs() < 0.01);
        assert!((rotated / n as f64 - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn random_hermitian_spectrum_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(4, 0.0, 1.0, &mut rng).unwrap();
        assert_eq!(h.hermitian_deviation(), 0.0);
        let eig = h.eigen_hermitian();
        assert!(eig.values.iter().all(|&l| (-1e-12..1.0 + 1e-12).contains(&l)));
    }
}
