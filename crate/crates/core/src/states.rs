//! Pure states, ensembles, entangled EPR states and Alice's change of basis.
//!
//! Ensembles are the primary mixed-state object. A [`DensityMatrix`] is only
//! ever derived from one, since different ensembles with equal density
//! matrices can still be told apart by a non-quadratic observable.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{self, basis_vector, inner, ComplexMatrix, ComplexVector};
use crate::tolerance;

/// A unit vector, understood as a ray.
///
/// Deserialization normalizes the given amplitudes, so `[[1,0],[1,0]]` is the
/// `+x` qubit state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexVector", into = "ComplexVector")]
pub struct PureState {
    vec: ComplexVector,
}

impl PureState {
    /// Wraps a vector that must already be unit within `1e-12`.
    pub fn new(vec: ComplexVector) -> Result<Self> {
        let n = vec.norm();
        if (n - 1.0).abs() > tolerance::STRUCTURAL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { vec })
    }

    /// Normalizes any non-zero vector.
    pub fn normalize(vec: ComplexVector) -> Result<Self> {
        Ok(Self {
            vec: vec.normalized()?,
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        Ok(Self {
            vec: basis_vector(dim, index)?,
        })
    }

    pub fn from_amplitudes(amps: &[Complex64]) -> Result<Self> {
        Self::normalize(ComplexVector::new(amps.to_vec())?)
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        Ok(Self {
            vec: hilbert::random_pure(dim, rng)?,
        })
    }

    pub(crate) fn from_unit_unchecked(vec: ComplexVector) -> Self {
        Self { vec }
    }

    pub fn dim(&self) -> usize {
        self.vec.dim()
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vec
    }

    pub fn projector(&self) -> ComplexMatrix {
        self.vec.projector()
    }

    /// Multiplies by a global phase `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> Self {
        Self {
            vec: self.vec.scale(Complex64::from_polar(1.0, theta)),
        }
    }

    /// Frobenius distance between rank-one projectors; zero iff same ray.
    pub fn ray_distance(&self, other: &PureState) -> Result<f64> {
        self.projector().frobenius_distance(&other.projector())
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        Ok(inner(&self.vec, &other.vec)?.norm_sqr())
    }
}

impl TryFrom<ComplexVector> for PureState {
    type Error = Error;
    /// Unit vectors are kept bit-exact; anything else is normalized.
    fn try_from(v: ComplexVector) -> Result<Self> {
        Self::new(v.clone()).or_else(|_| Self::normalize(v))
    }
}

impl From<PureState> for ComplexVector {
    fn from(s: PureState) -> Self {
        s.vec
    }
}

/// Worst deviation of the Gram matrix of `vs` from the identity.
pub fn orthonormality_error(vs: &[PureState]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, u) in vs.iter().enumerate() {
        for (j, v) in vs.iter().enumerate().skip(i) {
            let g = inner(u.vector(), v.vector())?;
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}

fn check_same_dim(vs: &[PureState]) -> Result<usize> {
    let dim = vs
        .first()
        .map(PureState::dim)
        .ok_or(Error::InvalidDimension(0))?;
    if let Some(v) = vs.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: v.dim(),
        });
    }
    Ok(dim)
}

/// A subspace given by an orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Subspace {
    basis: Vec<PureState>,
}

impl Subspace {
    /// `basis` must be orthonormal within `1e-10`.
    pub fn new(basis: Vec<PureState>) -> Result<Self> {
        let ambient = check_same_dim(&basis)?;
        if basis.len() > ambient {
            return Err(Error::InvalidParameter(format!(
                "{} basis vectors in dimension {ambient}",
                basis.len()
            )));
        }
        let err = orthonormality_error(&basis)?;
        if err > tolerance::DERIVED {
            return Err(Error::NotOrthonormal(err));
        }
        Ok(Self { basis })
    }

    /// `span(e_0, ..., e_{n-1})`.
    pub fn coordinate(ambient: usize, n: usize) -> Result<Self> {
        if n == 0 || n > ambient {
            return Err(Error::InvalidParameter(format!(
                "subspace dimension {n} in ambient dimension {ambient}"
            )));
        }
        Self::new((0..n).map(|i| PureState::basis(ambient, i)).collect::<Result<_>>()?)
    }

    /// Haar-random `n`-dimensional subspace.
    pub fn random<R: Rng + ?Sized>(ambient: usize, n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || n > ambient {
            return Err(Error::InvalidParameter(format!(
                "subspace dimension {n} in ambient dimension {ambient}"
            )));
        }
        let u = hilbert::haar_unitary(ambient, rng)?;
        Ok(Self {
            basis: (0..n)
                .map(|j| PureState::from_unit_unchecked(u.column(j)))
                .collect(),
        })
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis[0].dim()
    }

    pub fn projector(&self) -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(self.ambient_dim());
        for b in &self.basis {
            p = &p + &b.projector();
        }
        p
    }

    /// Another basis of the same subspace: `b'_k = Σ_j U_jk b_j`.
    pub fn rotated(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.dim(),
            });
        }
        let basis = (0..self.dim())
            .map(|k| {
                let mut v = ComplexVector::zeros(self.ambient_dim())?;
                for (j, b) in self.basis.iter().enumerate() {
                    v = v.add_scaled(u.get(j, k), b.vector())?;
                }
                Ok(PureState::from_unit_unchecked(v))
            })
            .collect::<Result<_>>()?;
        Ok(Self { basis })
    }

    /// Haar-random basis of the same subspace.
    pub fn random_rebasis<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self> {
        self.rotated(&hilbert::haar_unitary(self.dim(), rng)?)
    }

    /// Largest `|<y|z>|` between the two bases.
    pub fn overlap_with(&self, other: &Subspace) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for y in &self.basis {
            for z in &other.basis {
                worst = worst.max(inner(y.vector(), z.vector())?.norm());
            }
        }
        Ok(worst)
    }

    /// `Y ⊕ Z` with the concatenated basis; the inputs must be orthogonal
    /// within `1e-10`.
    pub fn direct_sum(&self, other: &Subspace) -> Result<Self> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                actual: other.ambient_dim(),
            });
        }
        let overlap = self.overlap_with(other)?;
        if overlap > tolerance::DERIVED {
            return Err(Error::NotOrthogonal(overlap));
        }
        Self::new(self.basis.iter().chain(&other.basis).cloned().collect())
    }

    /// Splits the basis after the first `r` vectors.
    pub fn split(&self, r: usize) -> Result<(Self, Self)> {
        if r == 0 || r >= self.dim() {
            return Err(Error::InvalidParameter(format!(
                "cannot split a {}-dimensional basis at {r}",
                self.dim()
            )));
        }
        Ok((
            Self {
                basis: self.basis[..r].to_vec(),
            },
            Self {
                basis: self.basis[r..].to_vec(),
            },
        ))
    }
}

/// `Ψ = Σ α_i |A_i>|b_i>` with orthonormal `A_i` and unit (not necessarily
/// orthogonal) `b_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EntangledRepr", into = "EntangledRepr")]
pub struct EntangledState {
    alphas: Vec<Complex64>,
    alice_basis: Vec<PureState>,
    bob_states: Vec<PureState>,
    dim_a: usize,
    dim_b: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntangledRepr {
    alphas: Vec<Complex64>,
    alice_basis: Vec<PureState>,
    bob_states: Vec<PureState>,
}

impl TryFrom<EntangledRepr> for EntangledState {
    type Error = Error;
    fn try_from(r: EntangledRepr) -> Result<Self> {
        build_entangled(r.alphas, r.alice_basis, r.bob_states)
    }
}

impl From<EntangledState> for EntangledRepr {
    fn from(s: EntangledState) -> Self {
        Self {
            alphas: s.alphas,
            alice_basis: s.alice_basis,
            bob_states: s.bob_states,
        }
    }
}

/// Validates and assembles an entangled state.
pub fn build_entangled(
    alphas: Vec<Complex64>,
    alice_basis: Vec<PureState>,
    bob_states: Vec<PureState>,
) -> Result<EntangledState> {
    let n = alphas.len();
    if n == 0 {
        return Err(Error::InvalidParameter("no branches".into()));
    }
    for (what, len) in [("alice_basis", alice_basis.len()), ("bob_states", bob_states.len())] {
        if len != n {
            return Err(Error::InvalidParameter(format!(
                "{what} has {len} entries but there are {n} coefficients"
            )));
        }
    }
    let dim_a = check_same_dim(&alice_basis)?;
    let dim_b = check_same_dim(&bob_states)?;
    if n > dim_a {
        return Err(Error::InvalidParameter(format!(
            "{n} branches exceed Alice dimension {dim_a}"
        )));
    }
    if let Some(i) = alphas.iter().position(|a| !a.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let weight: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
    if (weight - 1.0).abs() > tolerance::STRUCTURAL {
        return Err(Error::CoefficientsNotNormalized(weight));
    }
    let err = orthonormality_error(&alice_basis)?;
    if err > tolerance::STRUCTURAL {
        return Err(Error::NotOrthonormal(err));
    }
    let state = EntangledState {
        alphas,
        alice_basis,
        bob_states,
        dim_a,
        dim_b,
    };
    let norm = state.flatten().norm();
    if (norm - 1.0).abs() > tolerance::STRUCTURAL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(state)
}

impl EntangledState {
    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn alice_basis(&self) -> &[PureState] {
        &self.alice_basis
    }

    pub fn bob_states(&self) -> &[PureState] {
        &self.bob_states
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn branches(&self) -> usize {
        self.alphas.len()
    }

    /// The vector `Σ α_i A_i ⊗ b_i` in `H_A ⊗ H_B`.
    pub fn flatten(&self) -> ComplexVector {
        let mut psi = ComplexVector::zeros(self.dim_a * self.dim_b).expect("positive dims");
        for ((a, alice), bob) in self.alphas.iter().zip(&self.alice_basis).zip(&self.bob_states) {
            let term = hilbert::tensor(alice.vector(), bob.vector());
            psi = psi.add_scaled(*a, &term).expect("consistent dims");
        }
        psi
    }

    /// Checks that `new_basis` is orthonormal and spans the same subspace of
    /// `H_A` as the current Alice basis. Returns the span deviation.
    pub fn check_alice_basis(&self, new_basis: &[PureState]) -> Result<f64> {
        if new_basis.len() != self.branches() {
            return Err(Error::InvalidParameter(format!(
                "new basis has {} vectors, expected {}",
                new_basis.len(),
                self.branches()
            )));
        }
        let dim = check_same_dim(new_basis)?;
        if dim != self.dim_a {
            return Err(Error::DimensionMismatch {
                expected: self.dim_a,
                actual: dim,
            });
        }
        let err = orthonormality_error(new_basis)?;
        if err > tolerance::DERIVED {
            return Err(Error::NotOrthonormal(err));
        }
        let mut deviation: f64 = 0.0;
        for a_new in new_basis {
            let captured: f64 = self
                .alice_basis
                .iter()
                .map(|a| inner(a.vector(), a_new.vector()).map(|c| c.norm_sqr()))
                .sum::<Result<f64>>()?;
            deviation = deviation.max((1.0 - captured).abs());
        }
        if deviation > tolerance::DERIVED {
            return Err(Error::SpanMismatch(deviation));
        }
        Ok(deviation)
    }

    /// Re-expresses `Ψ` in another Alice basis of the same subspace:
    /// `α'_j |b'_j> = Σ_i α_i <A'_j|A_i> |b_i>`, with `α'_j ≥ 0` real and the
    /// phase absorbed into `b'_j`. Branches of weight below `1e-12` keep
    /// `α'_j = 0` and the placeholder `b'_j = e_0`.
    pub fn rebase_alice(&self, new_basis: &[PureState]) -> Result<EntangledState> {
        self.check_alice_basis(new_basis)?;
        let mut alphas = Vec::with_capacity(self.branches());
        let mut bob_states = Vec::with_capacity(self.branches());
        for a_new in new_basis {
            let mut v = ComplexVector::zeros(self.dim_b)?;
            for ((alpha, a_old), b) in self.alphas.iter().zip(&self.alice_basis).zip(&self.bob_states) {
                let c = inner(a_new.vector(), a_old.vector())?;
                v = v.add_scaled(alpha * c, b.vector())?;
            }
            let norm = v.norm();
            if norm < tolerance::ZERO_BRANCH {
                alphas.push(Complex64::new(0.0, 0.0));
                bob_states.push(PureState::basis(self.dim_b, 0)?);
            } else {
                alphas.push(Complex64::new(norm, 0.0));
                bob_states.push(PureState::from_unit_unchecked(
                    v.scale(Complex64::new(1.0 / norm, 0.0)),
                ));
            }
        }
        Ok(EntangledState {
            alphas,
            alice_basis: new_basis.to_vec(),
            bob_states,
            dim_a: self.dim_a,
            dim_b: self.dim_b,
        })
    }

    /// Bob's ensemble when Alice measures in the current basis: `b_i` with
    /// frequency `|α_i|^2`. Zero-weight branches are dropped.
    pub fn conditional_ensemble(&self) -> Ensemble {
        let members = self
            .alphas
            .iter()
            .zip(&self.bob_states)
            .filter(|(a, _)| a.norm() >= tolerance::ZERO_BRANCH)
            .map(|(a, b)| (a.norm_sqr(), b.clone()))
            .collect();
        Ensemble { members }
    }

    /// Reduced density matrix of B computed from the flattened vector.
    pub fn reduced_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(hilbert::partial_trace_a(&self.flatten(), self.dim_a, self.dim_b)?)
    }
}

/// Random entangled state with Haar Alice basis, random coefficients and Haar
/// Bob states.
pub fn random_entangled<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    n: usize,
    rng: &mut R,
) -> Result<EntangledState> {
    if n == 0 || n > dim_a {
        return Err(Error::InvalidParameter(format!(
            "{n} branches in Alice dimension {dim_a}"
        )));
    }
    let alphas: Vec<Complex64> = hilbert::random_unit_vector(n, rng)?.entries().to_vec();
    let alice_basis = Subspace::random(dim_a, n, rng)?.basis;
    let bob_states = (0..n)
        .map(|_| PureState::random(dim_b, rng))
        .collect::<Result<_>>()?;
    build_entangled(alphas, alice_basis, bob_states)
}

/// Haar-random orthonormal basis of the span of `state`'s Alice basis.
pub fn random_alice_rebasing<R: Rng + ?Sized>(
    state: &EntangledState,
    rng: &mut R,
) -> Result<Vec<PureState>> {
    let span = Subspace {
        basis: state.alice_basis.clone(),
    };
    Ok(span.random_rebasis(rng)?.basis)
}

/// Probability-weighted pure states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<EnsembleMember>", into = "Vec<EnsembleMember>")]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleMember {
    weight: f64,
    state: PureState,
}

impl TryFrom<Vec<EnsembleMember>> for Ensemble {
    type Error = Error;
    fn try_from(ms: Vec<EnsembleMember>) -> Result<Self> {
        Self::new(ms.into_iter().map(|m| (m.weight, m.state)).collect())
    }
}

impl From<Ensemble> for Vec<EnsembleMember> {
    fn from(e: Ensemble) -> Self {
        e.members
            .into_iter()
            .map(|(weight, state)| EnsembleMember { weight, state })
            .collect()
    }
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidEnsemble("no members".into()));
        }
        if let Some((p, _)) = members.iter().find(|(p, _)| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidEnsemble(format!("invalid weight {p}")));
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > tolerance::STRUCTURAL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        let states: Vec<PureState> = members.iter().map(|(_, s)| s.clone()).collect();
        check_same_dim(&states)?;
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.members.iter().map(|(p, _)| *p)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights().sum()
    }

    /// `Σ p_i |b_i><b_i|`.
    pub fn density(&self) -> DensityMatrix {
        let mut rho = ComplexMatrix::zeros(self.dim());
        for (p, s) in &self.members {
            rho = rho
                .try_add_scaled(Complex64::new(*p, 0.0), &s.projector())
                .expect("ensemble members share a dimension");
        }
        DensityMatrix { mat: rho }
    }

    pub fn sampler(&self) -> EnsembleSampler {
        let mut acc = 0.0;
        let cumulative = self
            .weights()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        EnsembleSampler { cumulative }
    }
}

/// Inverse-CDF sampling over ensemble weights.
#[derive(Debug, Clone)]
pub struct EnsembleSampler {
    cumulative: Vec<f64>,
}

impl EnsembleSampler {
    /// Index `i` with `cum[i-1] < u <= cum[i]` for `u` uniform in `[0, 1)`;
    /// on a boundary the earlier interval wins.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.index_for(u)
    }

    pub fn index_for(&self, u: f64) -> usize {
        let last = self.cumulative.len() - 1;
        self.cumulative.partition_point(|&c| c < u).min(last)
    }
}

/// `ensemble_density` under its operational name.
pub fn ensemble_density(ens: &Ensemble) -> DensityMatrix {
    ens.density()
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let herm = mat.hermitian_deviation();
        if herm > tolerance::STRUCTURAL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = mat.trace();
        if (tr - 1.0).norm() > tolerance::STRUCTURAL {
            return Err(Error::InvalidParameter(format!("trace {tr} is not 1")));
        }
        let min = mat.min_eigenvalue();
        if min < -tolerance::STRUCTURAL {
            return Err(Error::InvalidParameter(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { mat })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.mat.frobenius_distance(&other.mat)
    }
}

/// Frobenius distance and whether it is below `tol`.
pub fn density_equal(r1: &DensityMatrix, r2: &DensityMatrix, tol: f64) -> Result<(bool, f64)> {
    let d = r1.frobenius_distance(r2)?;
    Ok((d < tol, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn e(d: usize, i: usize) -> PureState {
        PureState::basis(d, i).unwrap()
    }

    fn plus() -> PureState {
        PureState::from_amplitudes(&[c(1.0), c(1.0)]).unwrap()
    }

    fn minus() -> PureState {
        PureState::from_amplitudes(&[c(1.0), c(-1.0)]).unwrap()
    }

    fn bell() -> EntangledState {
        build_entangled(vec![c(S), c(S)], vec![e(2, 0), e(2, 1)], vec![e(2, 0), e(2, 1)]).unwrap()
    }

    fn half_identity() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::identity(2).scale(c(0.5))).unwrap()
    }

    #[test]
    fn product_state_is_unit() {
        let s = build_entangled(vec![c(1.0)], vec![e(3, 1)], vec![plus()]).unwrap();
        assert!((s.flatten().norm() - 1.0).abs() < 1e-12);
        assert_eq!(s.dim_a(), 3);
        assert_eq!(s.dim_b(), 2);
    }

    #[test]
    fn bell_state_norm_and_partial_trace() {
        let s = bell();
        assert!((s.flatten().norm() - 1.0).abs() < 1e-12);
        let rho = s.reduced_density().unwrap();
        assert!(rho.frobenius_distance(&half_identity()).unwrap() < 1e-15);
    }

    #[test]
    fn non_orthogonal_bob_states_are_accepted() {
        let s = build_entangled(vec![c(S), c(S)], vec![e(2, 0), e(2, 1)], vec![e(2, 0), plus()]).unwrap();
        assert!((s.flatten().norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            build_entangled(vec![c(1.0), c(1.0)], vec![e(2, 0), e(2, 1)], vec![e(2, 0), e(2, 1)]),
            Err(Error::CoefficientsNotNormalized(_))
        ));
        assert!(matches!(
            build_entangled(vec![c(S), c(S)], vec![e(2, 0), plus()], vec![e(2, 0), e(2, 1)]),
            Err(Error::NotOrthonormal(_))
        ));
        assert!(matches!(
            build_entangled(vec![c(S), c(S)], vec![e(2, 0), e(3, 1)], vec![e(2, 0), e(2, 1)]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(build_entangled(vec![c(S), c(S)], vec![e(2, 0)], vec![e(2, 0), e(2, 1)]).is_err());
        assert!(build_entangled(vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn rebase_to_same_basis_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_entangled(3, 2, 3, &mut rng).unwrap();
        let r = s.rebase_alice(s.alice_basis()).unwrap();
        for (a, b) in s.alphas().iter().zip(r.alphas()) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
        for (a, b) in s.bob_states().iter().zip(r.bob_states()) {
            assert!(a.ray_distance(b).unwrap() < 1e-12);
        }
        assert!(s.flatten().distance(&r.flatten()) < 1e-12);
    }

    #[test]
    fn rebase_bell_to_hadamard_basis() {
        let r = bell().rebase_alice(&[plus(), minus()]).unwrap();
        assert!((r.alphas()[0] - c(S)).norm() < 1e-12);
        assert!((r.alphas()[1] - c(S)).norm() < 1e-12);
        assert!(r.bob_states()[0].ray_distance(&plus()).unwrap() < 1e-12);
        assert!(r.bob_states()[1].ray_distance(&minus()).unwrap() < 1e-12);
        assert!(bell().flatten().distance(&r.flatten()) < 1e-12);
    }

    #[test]
    fn rebase_of_embedded_product_state() {
        let b1 = PureState::from_amplitudes(&[c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let s = build_entangled(vec![c(1.0), c(0.0)], vec![e(2, 0), e(2, 1)], vec![b1.clone(), e(2, 1)]).unwrap();
        let theta: f64 = 0.3;
        let a0 = PureState::from_amplitudes(&[c(theta.cos()), c(theta.sin())]).unwrap();
        let a1 = PureState::from_amplitudes(&[c(-theta.sin()), c(theta.cos())]).unwrap();
        let r = s.rebase_alice(&[a0.clone(), a1.clone()]).unwrap();
        let e0 = e(2, 0);
        for (j, a) in [a0, a1].iter().enumerate() {
            assert!(r.bob_states()[j].ray_distance(&b1).unwrap() < 1e-12);
            let expected = inner(a.vector(), e0.vector()).unwrap().norm();
            assert!((r.alphas()[j].re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn rebase_keeps_zero_branch_with_placeholder() {
        let s = build_entangled(vec![c(1.0)], vec![e(2, 0)], vec![plus()]).unwrap();
        // One branch spans span(e0); the only basis of it is e0 up to phase.
        let r = s.rebase_alice(&[e(2, 0).with_phase(0.4)]).unwrap();
        assert_eq!(r.branches(), 1);

        let s = build_entangled(vec![c(1.0), c(0.0)], vec![e(2, 0), e(2, 1)], vec![plus(), minus()]).unwrap();
        let r = s.rebase_alice(&[e(2, 1), e(2, 0)]).unwrap();
        assert_eq!(r.alphas()[0], c(0.0));
        assert_eq!(r.bob_states()[0], e(2, 0));
        assert_eq!(r.conditional_ensemble().len(), 1);
    }

    #[test]
    fn rebase_rejects_different_span() {
        let s = build_entangled(vec![c(1.0)], vec![e(3, 0)], vec![plus()]).unwrap();
        assert!(matches!(s.rebase_alice(&[e(3, 1)]), Err(Error::SpanMismatch(_))));
        assert!(s.rebase_alice(&[e(3, 0), e(3, 1)]).is_err());
    }

    #[test]
    fn conditional_ensembles_of_bell_state() {
        let ens = bell().conditional_ensemble();
        assert_eq!(ens.len(), 2);
        assert!((ens.members()[0].0 - 0.5).abs() < 1e-15);
        assert_eq!(ens.members()[0].1, e(2, 0));
        assert_eq!(ens.members()[1].1, e(2, 1));

        let rebased = bell().rebase_alice(&[plus(), minus()]).unwrap().conditional_ensemble();
        assert!((rebased.members()[0].0 - 0.5).abs() < 1e-12);
        assert!(rebased.members()[0].1.ray_distance(&plus()).unwrap() < 1e-12);
        assert!(rebased.members()[1].1.ray_distance(&minus()).unwrap() < 1e-12);

        let single = build_entangled(vec![c(1.0)], vec![e(2, 0)], vec![plus()]).unwrap();
        assert_eq!(single.conditional_ensemble().members(), &[(1.0, plus())]);
    }

    #[test]
    fn ensemble_density_examples() {
        let pure = Ensemble::new(vec![(1.0, e(2, 0))]).unwrap();
        assert!(pure.density().matrix().frobenius_distance(&e(2, 0).projector()).unwrap() < 1e-15);
        let mixed = Ensemble::new(vec![(0.5, e(2, 0)), (0.5, e(2, 1))]).unwrap();
        assert!(mixed.density().frobenius_distance(&half_identity()).unwrap() < 1e-15);
        let z = bell().conditional_ensemble().density();
        let x = bell().rebase_alice(&[plus(), minus()]).unwrap().conditional_ensemble().density();
        let (equal, dist) = density_equal(&z, &x, 1e-12).unwrap();
        assert!(equal, "distance {dist}");
    }

    #[test]
    fn density_equal_reports_distance() {
        let (eq, d) = density_equal(&half_identity(), &half_identity(), 1e-12).unwrap();
        assert!(eq);
        assert_eq!(d, 0.0);
        let pure = DensityMatrix::new(e(2, 0).projector()).unwrap();
        let (eq, d) = density_equal(&half_identity(), &pure, 1e-12).unwrap();
        assert!(!eq);
        assert!((d - S).abs() < 1e-15);
        let three = DensityMatrix::new(e(3, 0).projector()).unwrap();
        assert!(density_equal(&pure, &three, 1e-12).is_err());
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(vec![]).is_err());
        assert!(Ensemble::new(vec![(0.6, e(2, 0)), (0.6, e(2, 1))]).is_err());
        assert!(Ensemble::new(vec![(1.5, e(2, 0)), (-0.5, e(2, 1))]).is_err());
        assert!(Ensemble::new(vec![(0.5, e(2, 0)), (0.5, e(3, 1))]).is_err());
    }

    #[test]
    fn sampler_boundaries_go_to_first_interval() {
        let ens = Ensemble::new(vec![(0.25, e(2, 0)), (0.75, e(2, 1))]).unwrap();
        let s = ens.sampler();
        assert_eq!(s.index_for(0.0), 0);
        assert_eq!(s.index_for(0.25), 0);
        assert_eq!(s.index_for(0.250001), 1);
        assert_eq!(s.index_for(0.999999), 1);
    }

    #[test]
    fn subspace_operations() {
        let x = Subspace::coordinate(3, 3).unwrap();
        let (y, z) = x.split(1).unwrap();
        assert_eq!(y.dim(), 1);
        assert_eq!(z.dim(), 2);
        let back = y.direct_sum(&z).unwrap();
        assert_eq!(back, x);
        assert!(matches!(y.direct_sum(&y), Err(Error::NotOrthogonal(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = z.random_rebasis(&mut rng).unwrap();
        assert!(r.projector().frobenius_distance(&z.projector()).unwrap() < 1e-12);
        assert!(Subspace::new(vec![e(2, 0), plus()]).is_err());
    }

    #[test]
    fn serde_shape() {
        let json = serde_json::to_value(bell()).unwrap();
        assert!(json.get("alphas").is_some());
        let back: EntangledState = serde_json::from_value(json).unwrap();
        assert!(back.flatten().distance(&bell().flatten()) < 1e-15);
        let p: PureState = serde_json::from_str("[[1,0],[1,0]]").unwrap();
        assert!(p.ray_distance(&plus()).unwrap() < 1e-15);
        let ens: Ensemble =
            serde_json::from_str(r#"[{"weight":0.5,"state":[[1,0],[0,0]]},{"weight":0.5,"state":[[0,0],[1,0]]}]"#).unwrap();
        assert_eq!(ens.len(), 2);
    }
}
