//! Functional observables `f: S_B -> R`.
//!
//! An observable is a real function on unit vectors of `H_B` that depends only
//! on the ray. Quadratic observables `<ψ|F|ψ>` are the orthodox ones; the
//! powers `<ψ|P|ψ>^k` are the stock non-quadratic family.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ComplexMatrix, ComplexVector};
use crate::states::{Ensemble, PureState};
use crate::tolerance;

type Evaluator = Arc<dyn Fn(&PureState) -> f64 + Send + Sync>;

/// What an observable is built from.
#[derive(Clone)]
pub enum ObservableKind {
    /// `<ψ|F|ψ>`.
    Quadratic(ComplexMatrix),
    /// `<ψ|P|ψ>^k`, `k >= 2`.
    Power { p: ComplexMatrix, k: u32 },
    /// `Σ c_i f_i(ψ)`.
    Combination(Vec<(f64, FunctionalObservable)>),
    /// Opaque evaluator, spot-checked for ray invariance at construction.
    Custom { name: String, eval: Evaluator },
}

impl fmt::Debug for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Quadratic(m) => f.debug_tuple("Quadratic").field(m).finish(),
            Self::Power { p, k } => f.debug_struct("Power").field("p", p).field("k", k).finish(),
            Self::Combination(terms) => f.debug_tuple("Combination").field(terms).finish(),
            Self::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FunctionalObservable {
    dim: usize,
    kind: ObservableKind,
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let dev = m.hermitian_deviation();
    if dev > tolerance::STRUCTURAL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// `f(ψ) = <ψ|F|ψ>` for Hermitian `F`.
pub fn quadratic(f: ComplexMatrix) -> Result<FunctionalObservable> {
    check_hermitian(&f)?;
    Ok(FunctionalObservable {
        dim: f.dim(),
        kind: ObservableKind::Quadratic(f),
    })
}

/// `f(ψ) = <ψ|P|ψ>^k` for Hermitian `P` and `k >= 2`.
pub fn power(p: ComplexMatrix, k: u32) -> Result<FunctionalObservable> {
    check_hermitian(&p)?;
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "power exponent must be at least 2, got {k}"
        )));
    }
    Ok(FunctionalObservable {
        dim: p.dim(),
        kind: ObservableKind::Power { p, k },
    })
}

/// `f ≡ value`, which is the quadratic form of `value * I`.
pub fn constant(dim: usize, value: f64) -> Result<FunctionalObservable> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    quadratic(ComplexMatrix::identity(dim).scale(Complex64::new(value, 0.0)))
}

/// `Σ c_i f_i`; all terms must share a dimension.
pub fn linear_combination(terms: Vec<(f64, FunctionalObservable)>) -> Result<FunctionalObservable> {
    let dim = terms
        .first()
        .map(|(_, f)| f.dim)
        .ok_or_else(|| Error::InvalidParameter("empty combination".into()))?;
    if let Some((_, f)) = terms.iter().find(|(_, f)| f.dim != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: f.dim,
        });
    }
    if let Some((c, _)) = terms.iter().find(|(c, _)| !c.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite coefficient {c}")));
    }
    Ok(FunctionalObservable {
        dim,
        kind: ObservableKind::Combination(terms),
    })
}

/// Number of random `(ψ, θ)` pairs used to spot-check a custom evaluator.
pub const RAY_CHECKS: usize = 10;

/// Wraps an opaque evaluator. Rejected unless it is finite and ray invariant
/// within `1e-12` on [`RAY_CHECKS`] random phase changes.
pub fn custom<F, R>(dim: usize, name: impl Into<String>, eval: F, rng: &mut R) -> Result<FunctionalObservable>
where
    F: Fn(&PureState) -> f64 + Send + Sync + 'static,
    R: Rng + ?Sized,
{
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let obs = FunctionalObservable {
        dim,
        kind: ObservableKind::Custom {
            name: name.into(),
            eval: Arc::new(eval),
        },
    };
    let dev = obs.ray_invariance_error(RAY_CHECKS, rng)?;
    if !dev.is_finite() || dev > tolerance::STRUCTURAL {
        return Err(Error::NotRayInvariant(dev));
    }
    Ok(obs)
}

impl FunctionalObservable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ObservableKind {
        &self.kind
    }

    pub fn evaluate(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: psi.dim(),
            });
        }
        Ok(self.eval_unchecked(psi.vector()))
    }

    fn eval_unchecked(&self, v: &ComplexVector) -> f64 {
        match &self.kind {
            ObservableKind::Quadratic(f) => f.expectation(v).expect("dims checked").re,
            ObservableKind::Power { p, k } => p.expectation(v).expect("dims checked").re.powi(*k as i32),
            ObservableKind::Combination(terms) => {
                terms.iter().map(|(c, f)| c * f.eval_unchecked(v)).sum()
            }
            ObservableKind::Custom { eval, .. } => eval(&PureState::from_unit_unchecked(v.clone())),
        }
    }

    /// The operator `F` with `f = <ψ|F|ψ>`, when that is known from the
    /// construction.
    pub fn quadratic_operator(&self) -> Option<ComplexMatrix> {
        match &self.kind {
            ObservableKind::Quadratic(f) => Some(f.clone()),
            ObservableKind::Power { p, k } => {
                // <ψ|cI|ψ>^k = c^k.
                let c = p.get(0, 0);
                let scalar = ComplexMatrix::identity(self.dim).scale(c);
                (p.max_abs_diff(&scalar).ok()? == 0.0)
                    .then(|| ComplexMatrix::identity(self.dim).scale(Complex64::new(c.re.powi(*k as i32), 0.0)))
            }
            ObservableKind::Combination(terms) => {
                let mut acc = ComplexMatrix::zeros(self.dim);
                for (c, f) in terms {
                    acc = acc.try_add_scaled(Complex64::new(*c, 0.0), &f.quadratic_operator()?).ok()?;
                }
                Some(acc)
            }
            ObservableKind::Custom { .. } => None,
        }
    }

    /// Ground truth from the construction: `Some(true)` if quadratic,
    /// `Some(false)` if provably not, `None` for opaque evaluators.
    pub fn is_quadratic_by_construction(&self) -> Option<bool> {
        match &self.kind {
            ObservableKind::Quadratic(_) => Some(true),
            ObservableKind::Power { .. } => Some(self.quadratic_operator().is_some()),
            ObservableKind::Combination(_) => self.quadratic_operator().map(|_| true),
            ObservableKind::Custom { .. } => None,
        }
    }

    /// Largest `|f(e^{iθ}ψ) - f(ψ)|` over `trials` random `(ψ, θ)`.
    pub fn ray_invariance_error<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let psi = PureState::random(self.dim, rng)?;
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let a = self.evaluate(&psi)?;
            let b = self.evaluate(&psi.with_phase(theta))?;
            if !a.is_finite() || !b.is_finite() {
                return Ok(f64::INFINITY);
            }
            worst = worst.max((a - b).abs());
        }
        Ok(worst)
    }

    pub fn descriptor(&self) -> ObservableDescriptor {
        self.clone().into()
    }
}

/// Statistical average `Σ p_i f(b_i)` over an ensemble.
pub fn ensemble_average(f: &FunctionalObservable, ens: &Ensemble) -> Result<f64> {
    if ens.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            actual: ens.dim(),
        });
    }
    ens.members()
        .iter()
        .map(|(p, b)| f.evaluate(b).map(|v| p * v))
        .sum()
}

/// Recovers the operator `F` that `f` would have if it were quadratic, from
/// its values on `e_j`, `(e_j + e_k)/√2` and `(e_j + i e_k)/√2`.
pub fn polarization_reconstruct(f: &FunctionalObservable, d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if f.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: f.dim(),
        });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let at = |amps: Vec<(usize, Complex64)>| -> f64 {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        for (i, a) in amps {
            v[i] = a;
        }
        f.eval_unchecked(&ComplexVector::from_vec_unchecked(v))
    };
    let diag: Vec<f64> = (0..d).map(|j| at(vec![(j, Complex64::new(1.0, 0.0))])).collect();
    let mut out = ComplexMatrix::diagonal(&diag);
    let mut entries = out.rows();
    for j in 0..d {
        for k in (j + 1)..d {
            let mean = 0.5 * (diag[j] + diag[k]);
            // <ψ|F|ψ> = mean + Re F_jk for ψ = (e_j + e_k)/√2,
            //         = mean - Im F_jk for ψ = (e_j + i e_k)/√2.
            let re = at(vec![(j, Complex64::new(s, 0.0)), (k, Complex64::new(s, 0.0))]) - mean;
            let im = mean - at(vec![(j, Complex64::new(s, 0.0)), (k, Complex64::new(0.0, s))]);
            entries[j][k] = Complex64::new(re, im);
            entries[k][j] = Complex64::new(re, -im);
        }
    }
    out = ComplexMatrix::from_rows(entries)?;
    Ok(out)
}

/// `max |f(ψ) - <ψ|F|ψ>|` over `samples` Haar-random `ψ`.
pub fn quadraticity_residual<R: Rng + ?Sized>(
    f: &FunctionalObservable,
    op: &ComplexMatrix,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    if op.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            actual: op.dim(),
        });
    }
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let psi = PureState::random(f.dim(), rng)?;
        let diff = f.evaluate(&psi)? - op.expectation(psi.vector())?.re;
        worst = worst.max(diff.abs());
    }
    Ok(worst)
}

/// Default number of Haar points used to spot-check the `[0, 1]` range.
pub const COUNTING_CHECKS: usize = 1000;

/// An observable valued in `[0, 1]`: a detector that fires or not.
#[derive(Debug, Clone)]
pub struct CountingObservable {
    inner: FunctionalObservable,
}

impl CountingObservable {
    /// Checks the range on the computational basis and [`COUNTING_CHECKS`]
    /// Haar-random states.
    pub fn new<R: Rng + ?Sized>(f: FunctionalObservable, rng: &mut R) -> Result<Self> {
        Self::with_checks(f, COUNTING_CHECKS, rng)
    }

    pub fn with_checks<R: Rng + ?Sized>(f: FunctionalObservable, samples: usize, rng: &mut R) -> Result<Self> {
        let tol = tolerance::STRUCTURAL;
        let check = |v: f64| {
            if !(-tol..=1.0 + tol).contains(&v) {
                Err(Error::NotCounting(v))
            } else {
                Ok(())
            }
        };
        for j in 0..f.dim() {
            check(f.evaluate(&PureState::basis(f.dim(), j)?)?)?;
        }
        for _ in 0..samples {
            check(f.evaluate(&PureState::random(f.dim(), rng)?)?)?;
        }
        Ok(Self { inner: f })
    }

    pub fn observable(&self) -> &FunctionalObservable {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn evaluate(&self, psi: &PureState) -> Result<f64> {
        self.inner.evaluate(psi)
    }

    pub fn into_inner(self) -> FunctionalObservable {
        self.inner
    }
}

/// JSON form of an observable. Matrices are row-major lists of `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObservableDescriptor {
    Quadratic {
        #[serde(rename = "F")]
        f: ComplexMatrix,
    },
    Power {
        #[serde(rename = "P")]
        p: ComplexMatrix,
        k: u32,
    },
    Constant {
        dim: usize,
        value: f64,
    },
    Combination {
        terms: Vec<CombinationTerm>,
    },
    /// Opaque evaluator; can be written out but not read back.
    Custom {
        name: String,
        dim: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinationTerm {
    pub coefficient: f64,
    pub observable: ObservableDescriptor,
}

impl ObservableDescriptor {
    pub fn build(&self) -> Result<FunctionalObservable> {
        match self {
            Self::Quadratic { f } => quadratic(f.clone()),
            Self::Power { p, k } => power(p.clone(), *k),
            Self::Constant { dim, value } => constant(*dim, *value),
            Self::Combination { terms } => linear_combination(
                terms
                    .iter()
                    .map(|t| Ok((t.coefficient, t.observable.build()?)))
                    .collect::<Result<_>>()?,
            ),
            Self::Custom { name, .. } => Err(Error::InvalidParameter(format!(
                "custom observable {name:?} cannot be rebuilt from a descriptor"
            ))),
        }
    }
}

impl From<FunctionalObservable> for ObservableDescriptor {
    fn from(f: FunctionalObservable) -> Self {
        match f.kind {
            ObservableKind::Quadratic(m) => Self::Quadratic { f: m },
            ObservableKind::Power { p, k } => Self::Power { p, k },
            ObservableKind::Combination(terms) => Self::Combination {
                terms: terms
                    .into_iter()
                    .map(|(coefficient, o)| CombinationTerm {
                        coefficient,
                        observable: o.into(),
                    })
                    .collect(),
            },
            ObservableKind::Custom { name, .. } => Self::Custom { name, dim: f.dim },
        }
    }
}

impl TryFrom<ObservableDescriptor> for FunctionalObservable {
    type Error = Error;
    fn try_from(d: ObservableDescriptor) -> Result<Self> {
        d.build()
    }
}

impl Serialize for FunctionalObservable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.descriptor().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FunctionalObservable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ObservableDescriptor::deserialize(d)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}
