//! Dense complex linear algebra: products, adjoints, Kronecker products,
//! Hermitian eigendecomposition and singular value decomposition.
//!
//! Both decompositions use Jacobi rotations. They are quadratically
//! convergent, produce orthonormal vectors to working precision and are
//! plenty fast at the sizes this crate targets (dimension up to a few dozen).
//!
//! Returned vectors follow one phase convention: the first entry whose
//! magnitude exceeds `tol.abs` is real and positive.

mod eigen;
mod matrix;
mod svd;

pub use eigen::{eig_hermitian, HermitianEigen};
pub use matrix::{complete_basis, fix_phase, inner, norm, orthogonalize_against, Matrix, C64, ONE, ZERO};
pub use svd::{svd, Svd};

use crate::error::{Error, Result};

/// Absolute/relative tolerance pair. A residual `r` measured against a
/// quantity of size `s` is accepted when `r <= abs + rel * s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance { abs: 1e-10, rel: 1e-10 };

    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        let valid = abs.is_finite() && rel.is_finite() && abs >= 0.0 && rel >= 0.0;
        if !valid || (abs == 0.0 && rel == 0.0) {
            return Err(Error::InvalidTolerance { abs, rel });
        }
        Ok(Self { abs, rel })
    }

    /// Same value for both parts.
    pub fn uniform(value: f64) -> Result<Self> {
        Self::new(value, value)
    }

    pub fn bound(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }

    pub fn admits(&self, residual: f64, scale: f64) -> bool {
        residual <= self.bound(scale)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Conjugate transpose.
pub fn dagger(m: &Matrix) -> Matrix {
    m.dagger()
}

/// Kronecker product, first factor slow.
pub fn tensor(a: &Matrix, b: &Matrix) -> Matrix {
    a.tensor(b)
}
