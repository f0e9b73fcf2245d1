//! Numerical tolerances shared across the crate.

/// Structural identities: normalization, orthonormality, Hermiticity.
pub const STRUCTURAL: f64 = 1e-12;

/// Identities reached through iterated or derived computations.
pub const DERIVED: f64 = 1e-10;

/// Default threshold for user-facing "is it quadratic" verdicts.
pub const VERDICT: f64 = 1e-8;

/// Branch weights below this are treated as probability-zero outcomes.
pub const ZERO_BRANCH: f64 = 1e-12;

/// Rank-deficiency cutoff used by Gram-Schmidt.
pub const RANK: f64 = 1e-10;

/// z-statistic at or above which a Monte-Carlo run declares signaling.
pub const DETECTION_Z: f64 = 5.0;
