//! Density operators and the constructive theorems about mixtures.
//!
//! * [`numerics`]: dense complex linear algebra (Kronecker products,
//!   Hermitian eigendecomposition, SVD).
//! * [`states`]: kets, density operators, ensembles, partial trace and the
//!   purity/correlation tests.
//! * [`decompositions`]: Schmidt decomposition, purification, the unitary
//!   relating two purifications of one reduced state, and ensemble steering.
//! * [`scenarios`]: executable demonstrations built from the above (amplitude
//!   vs. projector combination, the four-state reconstruction argument,
//!   preparation with an environment, premeasurement).
//! * [`selftest`]: randomized verification suites with independent oracles.

pub mod decompositions;
mod error;
pub mod numerics;
pub mod random;
pub mod scenarios;
pub mod selftest;
pub mod states;

pub use error::{Error, Result};
pub use numerics::{Matrix, Tolerance, C64};
pub use states::{BipartiteDims, DensityOperator, Ensemble, Ket, Subsystem};
