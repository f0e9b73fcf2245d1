//! Simulation of Alice-to-Bob signaling through an EPR source when Bob owns a
//! non-quadratic functional observable, together with numerical certifiers
//! deciding whether an observable is quadratic (and therefore cannot signal).
//!
//! Layout:
//! - [`hilbert`]: small dense complex linear algebra, Haar sampling, Bloch ball.
//! - [`states`]: pure states, ensembles, entangled states and Alice rebasing.
//! - [`observables`]: functional observables `f: S_B -> R` and their averages.
//! - [`signaling`]: exact signal gaps, Monte-Carlo detection, binary channel.
//! - [`nosignal`]: chord affinity scan (dim 2) and orthoadditive-measure
//!   certification (dim >= 3).

pub mod error;
pub mod hilbert;
pub mod nosignal;
pub mod observables;
pub mod signaling;
pub mod states;
pub mod streams;
pub mod tolerance;

pub use error::{Error, Result};
pub use hilbert::{BlochPoint, ComplexMatrix, ComplexVector};
pub use nosignal::{Certificate, ChordWitness, SubspaceMeasureRecord, Verdict, Witness};
pub use observables::{CountingObservable, FunctionalObservable, ObservableKind};
pub use signaling::{ChannelReport, Scenario, SignalReport};
pub use states::{DensityMatrix, Ensemble, EntangledState, PureState, Subspace};
pub use streams::Streams;

pub use num_complex::Complex64;
