//! Dense complex linear algebra over small Hilbert spaces.

mod bloch;
mod matrix;
mod random;
mod vector;

pub use bloch::{bloch_inverse, bloch_map, state_from_bloch, BlochPoint};
pub use matrix::{ComplexMatrix, HermitianEigen};
pub use random::{haar_unitary, random_hermitian, random_pure, random_unit_vector};
pub use vector::{basis_vector, gram_schmidt, inner, partial_trace_a, tensor, ComplexVector};

use num_complex::Complex64;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
