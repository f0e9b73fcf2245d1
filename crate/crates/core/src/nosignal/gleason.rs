use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Certificate, Method, Witness};
use crate::error::{Error, Result};
use crate::observables::{polarization_reconstruct, CountingObservable};
use crate::states::{PureState, Subspace};
use crate::streams::{domain, par_map, Streams};
use crate::tolerance;

/// `μ(X) = Σ_k f(b_k)` over the given orthonormal basis of `X`.
pub fn subspace_measure(f: &CountingObservable, x: &Subspace) -> Result<f64> {
    if x.ambient_dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            actual: x.ambient_dim(),
        });
    }
    x.basis().iter().map(|b| f.evaluate(b)).sum()
}

/// Spread of `μ(X)` across several orthonormal bases of one subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceMeasureRecord {
    /// The reference basis; the remaining bases are Haar rotations of it.
    pub basis: Vec<PureState>,
    pub subspace_dim: usize,
    /// `μ` on the reference basis.
    pub mu: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub basis_spread: f64,
    pub resamples: usize,
}

/// Evaluates `μ(X)` on the given basis and `resamples - 1` Haar-rotated ones.
pub fn basis_independence<R: Rng + ?Sized>(
    f: &CountingObservable,
    x: &Subspace,
    resamples: usize,
    rng: &mut R,
) -> Result<SubspaceMeasureRecord> {
    if resamples < 2 {
        return Err(Error::InvalidParameter("resamples must be at least 2".into()));
    }
    let mu = subspace_measure(f, x)?;
    let (mut lo, mut hi) = (mu, mu);
    for _ in 1..resamples {
        let m = subspace_measure(f, &x.random_rebasis(rng)?)?;
        lo = lo.min(m);
        hi = hi.max(m);
    }
    Ok(SubspaceMeasureRecord {
        basis: x.basis().to_vec(),
        subspace_dim: x.dim(),
        mu,
        mu_min: lo,
        mu_max: hi,
        basis_spread: hi - lo,
        resamples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoadditivityRecord {
    pub dim_y: usize,
    pub dim_z: usize,
    /// `|μ(Y) + μ(Z) - μ(Y ⊕ Z)|` with the concatenated basis.
    pub concatenated_violation: f64,
    /// Same with `Y`, `Z` and `Y ⊕ Z` each in an independent Haar basis.
    pub resampled_violation: f64,
    pub violation: f64,
}

/// Orthoadditivity of `μ` on `Y ⊥ Z`. The concatenated-basis defect is zero
/// by construction; basis dependence shows up in the resampled one.
pub fn orthoadditivity_check<R: Rng + ?Sized>(
    f: &CountingObservable,
    y: &Subspace,
    z: &Subspace,
    resamples: usize,
    rng: &mut R,
) -> Result<OrthoadditivityRecord> {
    let x = y.direct_sum(z)?;
    let (my, mz) = (subspace_measure(f, y)?, subspace_measure(f, z)?);
    let concatenated_violation = (my + mz - subspace_measure(f, &x)?).abs();
    let mut resampled_violation: f64 = 0.0;
    for _ in 0..resamples {
        let yr = subspace_measure(f, &y.random_rebasis(rng)?)?;
        let zr = subspace_measure(f, &z.random_rebasis(rng)?)?;
        let xr = subspace_measure(f, &x.random_rebasis(rng)?)?;
        resampled_violation = resampled_violation.max((yr + zr - xr).abs());
    }
    Ok(OrthoadditivityRecord {
        dim_y: y.dim(),
        dim_z: z.dim(),
        concatenated_violation,
        resampled_violation,
        violation: concatenated_violation.max(resampled_violation),
    })
}

/// `|μ(X) - Tr(F P_X)|` on one subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub subspace_dim: usize,
    pub mu: f64,
    pub trace_fp: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GleasonConfig {
    /// Haar-random subspaces per dimension, besides the coordinate one.
    pub subspaces_per_dim: usize,
    /// Bases per subspace in the basis-independence test.
    pub resamples: usize,
    /// Random subspaces on which `μ(X) = Tr(F P_X)` is checked.
    pub fit_subspaces: usize,
    pub tolerance: f64,
}

impl Default for GleasonConfig {
    fn default() -> Self {
        Self {
            subspaces_per_dim: 4,
            resamples: 32,
            fit_subspaces: 64,
            tolerance: tolerance::VERDICT,
        }
    }
}

/// Certifies a counting observable in dimension `d >= 3`.
///
/// 1. Basis independence of `μ` on the coordinate subspace and
///    `subspaces_per_dim` random subspaces of every dimension `1..=d`.
/// 2. Polarization reconstruction of `F`.
/// 3. `μ(X) = Tr(F P_X)` on `fit_subspaces` random subspaces.
/// 4. Positivity of `F`.
///
/// Every check contributes witnesses; the verdict compares the worst one with
/// the tolerance.
pub fn gleason_certify(
    f: &CountingObservable,
    config: &GleasonConfig,
    seed: u64,
    workers: usize,
) -> Result<Certificate> {
    let d = f.dim();
    if d < 3 {
        return Err(Error::InvalidDimension(d));
    }
    if config.resamples < 2 {
        return Err(Error::InvalidParameter("resamples must be at least 2".into()));
    }
    let streams = Streams::new(seed);
    let per_dim = config.subspaces_per_dim + 1;
    let jobs = d * per_dim;
    let spreads = par_map(workers, jobs, |job| -> Result<Witness> {
        let mut rng = streams.stream(domain::GLEASON, job as u64);
        let n = job / per_dim + 1;
        let x = if job % per_dim == 0 {
            Subspace::coordinate(d, n)?
        } else {
            Subspace::random(d, n, &mut rng)?
        };
        Ok(Witness::Subspace(basis_independence(f, &x, config.resamples, &mut rng)?))
    });

    let op = polarization_reconstruct(f.observable(), d)?;
    let fits = par_map(workers, config.fit_subspaces, |i| -> Result<Witness> {
        let mut rng = streams.stream(domain::GLEASON, (jobs + i) as u64);
        let n = rng.random_range(1..=d);
        let x = Subspace::random(d, n, &mut rng)?;
        let mu = subspace_measure(f, &x)?;
        let trace_fp = op.try_mul(&x.projector())?.trace().re;
        Ok(Witness::Fit(FitRecord {
            subspace_dim: n,
            mu,
            trace_fp,
            residual: (mu - trace_fp).abs(),
        }))
    });

    let mut witnesses = spreads.into_iter().chain(fits).collect::<Result<Vec<_>>>()?;
    witnesses.push(Witness::Positivity {
        min_eigenvalue: op.min_eigenvalue(),
    });
    // Exact Hermitian symmetry for the reported operator.
    let op = crate::hilbert::ComplexMatrix::from_fn(d, |i, j| {
        Complex64::new(0.5, 0.0) * (op.get(i, j) + op.get(j, i).conj())
    });
    Ok(Certificate::from_witnesses(
        Method::Gleason,
        witnesses,
        config.tolerance,
        seed,
        Some(op),
    ))
}
