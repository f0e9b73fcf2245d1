//! Certifiers deciding whether an observable can be consistent with the
//! density-matrix no-signal condition, i.e. whether it is quadratic.
//!
//! In dimension 2 the condition forces `f` to extend to an affine function on
//! the Bloch ball; [`affinity_scan`] looks for intersecting chords whose mixture
//! values disagree. From dimension 3 on, the basis-independent sums of a
//! counting observable form an orthoadditive subspace measure, which must be
//! `Tr(F P_X)`; [`gleason_certify`] checks basis independence and then the fit
//! of the reconstructed `F`.

mod chords;
mod gleason;

pub use chords::{
    affine_extension_scan, affinity_scan, chord_intersection, extremal_decomposition, AffineWitness,
    ChordWitness, ExtremalDecomposition,
};
pub use gleason::{
    basis_independence, gleason_certify, orthoadditivity_check, subspace_measure, FitRecord, GleasonConfig,
    OrthoadditivityRecord, SubspaceMeasureRecord,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::ComplexMatrix;
use crate::observables::{CountingObservable, FunctionalObservable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    QuadraticConsistent,
    NonQuadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Affinity,
    AffineExtension,
    Gleason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    Chord(ChordWitness),
    Affine(AffineWitness),
    Subspace(SubspaceMeasureRecord),
    Fit(FitRecord),
    Positivity { min_eigenvalue: f64 },
}

impl Witness {
    pub fn violation(&self) -> f64 {
        match self {
            Witness::Chord(w) => w.violation,
            Witness::Affine(w) => w.violation,
            Witness::Subspace(r) => r.basis_spread,
            Witness::Fit(r) => r.residual,
            Witness::Positivity { min_eigenvalue } => (-min_eigenvalue).max(0.0),
        }
    }
}

/// Outcome of a certifier run, with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub method: Method,
    pub verdict: Verdict,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reconstructed: Option<ComplexMatrix>,
    pub witnesses: Vec<Witness>,
}

impl Certificate {
    pub(crate) fn from_witnesses(
        method: Method,
        witnesses: Vec<Witness>,
        tolerance: f64,
        seed: u64,
        reconstructed: Option<ComplexMatrix>,
    ) -> Self {
        let worst_violation = witnesses.iter().map(Witness::violation).fold(0.0, f64::max);
        let verdict = if worst_violation < tolerance {
            Verdict::QuadraticConsistent
        } else {
            Verdict::NonQuadratic
        };
        Self {
            method,
            verdict,
            worst_violation,
            tolerance,
            seed,
            reconstructed,
            witnesses,
        }
    }

    pub fn is_quadratic(&self) -> bool {
        self.verdict == Verdict::QuadraticConsistent
    }

    /// The witness with the largest violation.
    pub fn worst_witness(&self) -> Option<&Witness> {
        self.witnesses
            .iter()
            .max_by(|a, b| a.violation().total_cmp(&b.violation()))
    }
}

/// Runs the certifier appropriate to the dimension: the chord scan in
/// dimension 2, the subspace-measure certifier (which needs a counting
/// observable) from dimension 3 on.
pub fn certify(
    f: &FunctionalObservable,
    n_chords: usize,
    gleason: &GleasonConfig,
    seed: u64,
    workers: usize,
) -> Result<Certificate> {
    match f.dim() {
        2 => affinity_scan(f, n_chords, gleason.tolerance, seed, workers),
        d if d >= 3 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let counting = CountingObservable::new(f.clone(), &mut rng)?;
            gleason_certify(&counting, gleason, seed, workers)
        }
        d => Err(Error::InvalidDimension(d)),
    }
}
