//! Exact combinatorics of symmetric-group representations.
//!
//! The crate is organised around a few layers:
//!
//! * [`partition`] and [`shape`]: Young diagrams, their sums, distances,
//!   hook lengths, dimensions and the explicit decompositions used when
//!   assembling Kronecker relations; continuous limit shapes.
//! * [`characters`]: Murnaghan–Nakayama character values and cached tables.
//! * [`kronecker`]: brute-force Kronecker coefficients, tensor supports and
//!   covering queries.
//! * [`certificate`]: positivity certificates built from axioms and the
//!   semigroup property, with a verifier and a text format.
//! * [`random`]: Plancherel and uniform samplers plus the statistics run over
//!   them.
//! * [`measure`]: Plancherel measure of supports and the covering lemmas that
//!   depend on it.

pub mod certificate;
pub mod characters;
pub mod config;
pub mod error;
pub mod kronecker;
pub mod measure;
pub mod partition;
pub mod quad;
pub mod random;
pub mod shape;

pub use error::{Error, Result};
pub use partition::Partition;
