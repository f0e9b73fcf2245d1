use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Certificate, Method, Witness};
use crate::error::{Error, Result};
use crate::hilbert::{bloch_inverse, state_from_bloch, BlochPoint};
use crate::observables::FunctionalObservable;
use crate::states::PureState;
use crate::streams::{domain, par_map, Streams};
use crate::tolerance;

/// Closest-approach distance below which two chords count as intersecting.
pub const INTERSECTION_TOLERANCE: f64 = 1e-9;

/// Two chords of the Bloch sphere through a common point `x`, with the
/// mixture values of `f` along each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordWitness {
    pub x1: BlochPoint,
    pub x2: BlochPoint,
    pub x1p: BlochPoint,
    pub x2p: BlochPoint,
    pub p1: f64,
    pub p2: f64,
    pub p1p: f64,
    pub p2p: f64,
    pub x: BlochPoint,
    /// `f` at `x1, x2, x1p, x2p`; zero until [`ChordWitness::evaluate`] runs.
    pub values: [f64; 4],
    /// `p1 f(x1) + p2 f(x2)`.
    pub lhs: f64,
    /// `p1' f(x1') + p2' f(x2')`.
    pub rhs: f64,
    pub violation: f64,
}

impl ChordWitness {
    /// Fills in both mixture values of `f` and their difference.
    pub fn evaluate(&mut self, f: &FunctionalObservable) -> Result<()> {
        let value = |p: BlochPoint| -> Result<f64> { f.evaluate(&PureState::new(state_from_bloch(p)?)?) };
        self.values = [value(self.x1)?, value(self.x2)?, value(self.x1p)?, value(self.x2p)?];
        let [v1, v2, v1p, v2p] = self.values;
        self.lhs = self.p1 * v1 + self.p2 * v2;
        self.rhs = self.p1p * v1p + self.p2p * v2p;
        self.violation = (self.lhs - self.rhs).abs();
        Ok(())
    }

    /// Largest distance between `x` and either convex combination.
    pub fn decomposition_error(&self) -> f64 {
        let a = BlochPoint::combine(self.p1, self.x1, self.p2, self.x2);
        let b = BlochPoint::combine(self.p1p, self.x1p, self.p2p, self.x2p);
        a.distance(self.x).max(b.distance(self.x))
    }
}

fn check_on_sphere(p: BlochPoint) -> Result<()> {
    let r = p.norm();
    if (r - 1.0).abs() > tolerance::DERIVED {
        return Err(Error::NotNormalized(r));
    }
    Ok(())
}

/// Intersection of the open chords `x1 x2` and `x1' x2'`, if any.
///
/// Parallel chords (collinear ones included) never produce a witness.
/// The returned witness is unevaluated.
pub fn chord_intersection(
    x1: BlochPoint,
    x2: BlochPoint,
    x1p: BlochPoint,
    x2p: BlochPoint,
) -> Result<Option<ChordWitness>> {
    for p in [x1, x2, x1p, x2p] {
        check_on_sphere(p)?;
    }
    let d1 = x2 - x1;
    let d2 = x2p - x1p;
    let r = x1 - x1p;
    let (a, b, c) = (d1.dot(d1), d1.dot(d2), d2.dot(d2));
    let (d, e) = (d1.dot(r), d2.dot(r));
    let denom = a * c - b * b;
    if a == 0.0 || c == 0.0 || denom <= 1e-14 * a * c {
        return Ok(None);
    }
    let s = (b * e - c * d) / denom;
    let t = (a * e - b * d) / denom;
    if !(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0) {
        return Ok(None);
    }
    let on_first = x1 + d1.scale(s);
    let on_second = x1p + d2.scale(t);
    if on_first.distance(on_second) >= INTERSECTION_TOLERANCE {
        return Ok(None);
    }
    Ok(Some(ChordWitness {
        x1,
        x2,
        x1p,
        x2p,
        p1: 1.0 - s,
        p2: s,
        p1p: 1.0 - t,
        p2p: t,
        x: (on_first + on_second).scale(0.5),
        values: [0.0; 4],
        lhs: 0.0,
        rhs: 0.0,
        violation: 0.0,
    }))
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> BlochPoint {
    loop {
        let v = BlochPoint::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v.scale(1.0 / n);
        }
    }
}

fn random_in_ball<R: Rng + ?Sized>(rng: &mut R) -> BlochPoint {
    let r = rng.random::<f64>().cbrt();
    random_direction(rng).scale(r)
}

/// Endpoints of the chord through interior `x` along unit `u`, with the
/// convex weights reproducing `x`.
fn chord_through(x: BlochPoint, u: BlochPoint) -> (BlochPoint, BlochPoint, f64, f64) {
    let b = x.dot(u);
    let disc = (b * b - x.dot(x) + 1.0).max(0.0).sqrt();
    let (t_plus, t_minus) = (-b + disc, -b - disc);
    let unit = |p: BlochPoint| p.scale(1.0 / p.norm());
    let x1 = unit(x + u.scale(t_plus));
    let x2 = unit(x + u.scale(t_minus));
    let span = t_plus - t_minus;
    (x1, x2, -t_minus / span, t_plus / span)
}

/// Coordinate-axis diameter pairs; for `<e0|ψ>^4` the z/x pair attains the
/// largest possible violation, 1/4.
fn diameter_witnesses() -> Vec<ChordWitness> {
    let axes = [
        BlochPoint::new(0.0, 0.0, 1.0),
        BlochPoint::new(1.0, 0.0, 0.0),
        BlochPoint::new(0.0, 1.0, 0.0),
    ];
    let mut out = Vec::new();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let w = chord_intersection(axes[i], axes[i].scale(-1.0), axes[j], axes[j].scale(-1.0))
                .expect("axes lie on the sphere")
                .expect("distinct diameters meet at the origin");
            out.push(w);
        }
    }
    out
}

/// Scans the coordinate diameter pairs plus `n_chords` random pairs of chords
/// meeting at a uniform interior point. Each pair must give equal mixture
/// values for a quadratic `f`.
pub fn affinity_scan(
    f: &FunctionalObservable,
    n_chords: usize,
    tolerance: f64,
    seed: u64,
    workers: usize,
) -> Result<Certificate> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: f.dim(),
        });
    }
    let streams = Streams::new(seed);
    let random = par_map(workers, n_chords, |i| -> Result<Option<ChordWitness>> {
        let mut rng = streams.stream(domain::AFFINITY, i as u64);
        let x = random_in_ball(&mut rng);
        let u = random_direction(&mut rng);
        let v = random_direction(&mut rng);
        let (x1, x2, _, _) = chord_through(x, u);
        let (x1p, x2p, _, _) = chord_through(x, v);
        let Some(mut w) = chord_intersection(x1, x2, x1p, x2p)? else {
            return Ok(None);
        };
        w.evaluate(f)?;
        Ok(Some(w))
    });
    let mut witnesses = Vec::with_capacity(n_chords + 3);
    for mut w in diameter_witnesses() {
        w.evaluate(f)?;
        witnesses.push(Witness::Chord(w));
    }
    for w in random {
        if let Some(w) = w? {
            witnesses.push(Witness::Chord(w));
        }
    }
    Ok(Certificate::from_witnesses(Method::Affinity, witnesses, tolerance, seed, None))
}

/// Check of `Φ(p y1 + (1-p) y2) = p Φ(y1) + (1-p) Φ(y2)` for interior
/// points, where `Φ` of a mixed point is the mixture value along a random
/// chord through it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineWitness {
    pub y1: BlochPoint,
    pub y2: BlochPoint,
    pub z: BlochPoint,
    pub p: f64,
    pub phi_y1: f64,
    pub phi_y2: f64,
    pub phi_z: f64,
    pub violation: f64,
}

fn mixture_value<R: Rng + ?Sized>(f: &FunctionalObservable, y: BlochPoint, rng: &mut R) -> Result<f64> {
    let (x1, x2, p1, p2) = chord_through(y, random_direction(rng));
    let value = |p: BlochPoint| -> Result<f64> { f.evaluate(&PureState::new(state_from_bloch(p)?)?) };
    Ok(p1 * value(x1)? + p2 * value(x2)?)
}

/// Affine-combination scan with weights drawn from `[-0.5, 1.5]`. A weight
/// that pushes the combination out of the ball is pulled back toward `[0, 1]`
/// until the point is inside.
pub fn affine_extension_scan(
    f: &FunctionalObservable,
    n: usize,
    tolerance: f64,
    seed: u64,
    workers: usize,
) -> Result<Certificate> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: f.dim(),
        });
    }
    let streams = Streams::new(seed);
    let witnesses = par_map(workers, n, |i| -> Result<Witness> {
        let mut rng = streams.stream(domain::AFFINE_EXTENSION, i as u64);
        let y1 = random_in_ball(&mut rng);
        let y2 = random_in_ball(&mut rng);
        let at = |p: f64| BlochPoint::combine(p, y1, 1.0 - p, y2);
        let mut p = rng.random_range(-0.5..=1.5);
        if at(p).norm() > 1.0 {
            let (mut outside, mut inside) = (p, p.clamp(0.0, 1.0));
            for _ in 0..60 {
                let mid = 0.5 * (outside + inside);
                if at(mid).norm() > 1.0 {
                    outside = mid;
                } else {
                    inside = mid;
                }
            }
            p = inside;
        }
        let z = at(p);
        let phi_y1 = mixture_value(f, y1, &mut rng)?;
        let phi_y2 = mixture_value(f, y2, &mut rng)?;
        let phi_z = mixture_value(f, z, &mut rng)?;
        Ok(Witness::Affine(AffineWitness {
            y1,
            y2,
            z,
            p,
            phi_y1,
            phi_y2,
            phi_z,
            violation: (phi_z - p * phi_y1 - (1.0 - p) * phi_y2).abs(),
        }))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(Certificate::from_witnesses(Method::AffineExtension, witnesses, tolerance, seed, None))
}

/// `Φ(x) = λ+ <b+|x|b+> + λ- <b-|x|b->` for a quadratic qubit observable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalDecomposition {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub b_plus: PureState,
    pub b_minus: PureState,
}

impl ExtremalDecomposition {
    /// `Φ` at any point of the Bloch ball.
    pub fn phi(&self, x: BlochPoint) -> Result<f64> {
        let rho = bloch_inverse(x)?;
        Ok(self.lambda_plus * rho.expectation(self.b_plus.vector())?.re
            + self.lambda_minus * rho.expectation(self.b_minus.vector())?.re)
    }
}

/// Extreme values and antipodal extremal states of a quadratic qubit
/// observable. Equal eigenvalues (constant `f`) are allowed.
pub fn extremal_decomposition(f: &FunctionalObservable) -> Result<ExtremalDecomposition> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: f.dim(),
        });
    }
    let op = f.quadratic_operator().ok_or_else(|| {
        Error::InvalidParameter("extremal decomposition needs a quadratic observable".into())
    })?;
    let eig = op.eigen_hermitian();
    Ok(ExtremalDecomposition {
        lambda_plus: eig.values[1],
        lambda_minus: eig.values[0],
        b_plus: PureState::normalize(eig.vectors[1].clone())?,
        b_minus: PureState::normalize(eig.vectors[0].clone())?,
    })
}
