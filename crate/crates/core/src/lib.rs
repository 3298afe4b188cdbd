//! Secure sketch built from bit-sampling locality-sensitive hashing and a
//! pair of binary linear codes.
//!
//! The crate is organised bottom-up:
//!
//! - [`bits`] and [`rng`]: fixed-length bit strings and the seeded generator
//!   every sampling step draws from.
//! - [`lsh`]: public index vectors and the resilient-vector map `Ω`.
//! - [`codes`]: BCH and random-generator codes with table syndrome decoding.
//! - [`sketch`]: the sketching procedure and its binary file format.
//! - [`recover`]: enumeration-based recovery.
//! - [`analysis`]: closed-form bound calculators.
//! - [`experiment`]: seeded Monte-Carlo harnesses over all of the above.

pub mod analysis;
pub mod bits;
pub mod codes;
pub mod combinatorics;
pub mod error;
pub mod experiment;
pub mod lsh;
pub mod rational;
pub mod recover;
pub mod rng;
pub mod sketch;

pub use bits::BitString;
pub use codes::{CodeKind, CodeSpec, LinearCode};
pub use error::{Error, Result};
pub use lsh::IndexVector;
pub use rational::Rational;
pub use recover::{RecoveryOutcome, RecoveryReport};
pub use rng::SeededRng;
pub use sketch::{Sketch, SketchParams, Sketcher};
