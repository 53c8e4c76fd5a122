//! Pure and mixed states of finite-dimensional systems.
//!
//! Joint systems use one index convention everywhere: basis state `|i, k>` of
//! `H_A (x) H_B` sits at position `i * dim_b + k` (subsystem A is the slow
//! index), which is also what [`Matrix::tensor`] produces.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, inner, norm, HermitianEigen, Matrix, Tolerance, C64, ONE, ZERO};

/// Allowed deviation of a ket norm, trace or weight sum from 1. Inputs
/// within this band are renormalized, beyond it they are rejected.
pub const NORMALIZATION_SLACK: f64 = 1e-8;

/// Two ensemble kets count as the same ray when `|<a|b>| >= 1 - DISTINCT_SLACK`.
pub const DISTINCT_SLACK: f64 = 1e-8;

/// Vectors with norm at or below this are treated as zero.
pub const ZERO_NORM_CUTOFF: f64 = 1e-12;

/// Normalized state vector.
#[derive(Clone, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    /// Accepts amplitudes whose squared norm is within [`NORMALIZATION_SLACK`]
    /// of 1 and rescales them to unit norm.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_vector(&amps)?;
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self::rescaled(amps, norm_sqr.sqrt()))
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        check_vector(&amps)?;
        let n = norm(&amps);
        if n <= ZERO_NORM_CUTOFF {
            return Err(Error::ZeroVector { norm: n });
        }
        Ok(Self::rescaled(amps, n))
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Standard basis ket `|index>` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self { amps }
    }

    fn rescaled(mut amps: Vec<C64>, n: f64) -> Self {
        if n != 1.0 {
            for z in amps.iter_mut() {
                *z /= n;
            }
        }
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        Ket { amps }
    }

    pub fn to_column(&self) -> Matrix {
        Matrix::column(&self.amps)
    }

    /// `min over theta of ||self - e^{i theta} other||`, with the optimal
    /// phase read off `<other|self>`.
    pub fn distance_up_to_phase(&self, other: &Ket) -> f64 {
        assert_eq!(self.dim(), other.dim(), "kets of different dimension");
        let overlap = other.inner(self);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - phase * b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn equal_up_to_phase(&self, other: &Ket, tol: &Tolerance) -> bool {
        self.dim() == other.dim() && tol.admits(self.distance_up_to_phase(other), 1.0)
    }

    /// Plain Euclidean distance, phase included.
    pub fn distance(&self, other: &Ket) -> f64 {
        assert_eq!(self.dim(), other.dim(), "kets of different dimension");
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

impl fmt::Debug for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter().map(|z| (z.re, z.im))).finish()
    }
}

fn check_vector(amps: &[C64]) -> Result<()> {
    if amps.is_empty() {
        return Err(Error::DimensionMismatch("ket has no amplitudes".into()));
    }
    if let Some(index) = amps.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, PartialEq)]
pub struct DensityOperator {
    matrix: Matrix,
    renormalized: bool,
}

impl DensityOperator {
    /// Validates a candidate density matrix. A trace within
    /// [`NORMALIZATION_SLACK`] of 1 is rescaled and flagged (see
    /// [`DensityOperator::was_renormalized`]); eigenvalues down to `-tol.abs`
    /// are accepted as round-off.
    pub fn new(matrix: Matrix, tol: &Tolerance) -> Result<Self> {
        let Some(residual) = matrix.hermiticity_residual() else {
            return Err(Error::DimensionMismatch(format!(
                "density operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        };
        if !tol.admits(residual, matrix.frobenius_norm()) {
            return Err(Error::NotHermitian { residual });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(Error::TraceNotUnit { trace });
        }
        let renormalized = !tol.admits((trace - 1.0).abs(), 1.0);
        let matrix = if trace != 1.0 { matrix.scale_real(1.0 / trace) } else { matrix };
        let spectrum = eig_hermitian(&matrix, tol)?;
        let min_eigenvalue = spectrum.values.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -tol.abs {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix, renormalized })
    }

    /// For matrices that are density operators by construction.
    pub(crate) fn from_matrix_unchecked(matrix: Matrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix, renormalized: false }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_unchecked(Matrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn diagonal(probabilities: &[f64], tol: &Tolerance) -> Result<Self> {
        Self::new(Matrix::diag(probabilities), tol)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// Whether construction had to rescale a trace that was off by more
    /// than the tolerance (but within [`NORMALIZATION_SLACK`]).
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn spectrum(&self, tol: &Tolerance) -> HermitianEigen {
        eig_hermitian(&self.matrix, tol).expect("density operators are Hermitian")
    }

    pub fn distance(&self, other: &DensityOperator) -> f64 {
        self.matrix.distance(&other.matrix)
    }
}

impl fmt::Debug for DensityOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityOperator({:?})", self.matrix)
    }
}

/// Weighted list of distinct pure states, `rho = sum_s w_s |phi_s><phi_s|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    weights: Vec<f64>,
    kets: Vec<Ket>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, Ket)>) -> Result<Self> {
        let (weights, kets): (Vec<f64>, Vec<Ket>) = entries.into_iter().unzip();
        let Some(first) = kets.first() else {
            return Err(Error::EmptyEnsemble);
        };
        let dim = first.dim();
        if let Some(k) = kets.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch(format!("ensemble mixes kets of dimension {dim} and {}", k.dim())));
        }
        // rounding may push a lone weight just past one
        if let Some(&weight) =
            weights.iter().find(|w| !(w.is_finite() && **w > 0.0 && **w <= 1.0 + NORMALIZATION_SLACK))
        {
            return Err(Error::InvalidWeight { weight });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(Error::WeightsNotNormalized { sum });
        }
        for first in 0..kets.len() {
            for second in first + 1..kets.len() {
                let overlap = kets[first].inner(&kets[second]).norm();
                if overlap >= 1.0 - DISTINCT_SLACK {
                    return Err(Error::DuplicateKet { first, second, overlap });
                }
            }
        }
        Ok(Self { weights, kets })
    }

    pub fn len(&self) -> usize {
        self.kets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.kets[0].dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kets(&self) -> &[Ket] {
        &self.kets
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Ket)> {
        self.weights.iter().copied().zip(&self.kets)
    }
}

/// Factorization `H = H_A (x) H_B` of a joint index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteDims {
    pub a: usize,
    pub b: usize,
}

impl BipartiteDims {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::DimensionMismatch(format!("factor dimensions {a}x{b} must be >= 1")));
        }
        Ok(Self { a, b })
    }

    pub fn total(&self) -> usize {
        self.a * self.b
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if dim != self.total() {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {dim} does not factor as {}x{}",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BipartiteDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.a, self.b)
    }
}

/// Which factor of a bipartite system survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// `|k><k|`.
pub fn projector(k: &Ket) -> DensityOperator {
    let amps = k.amps();
    let n = amps.len();
    DensityOperator::from_matrix_unchecked(Matrix::from_fn(n, n, |i, j| amps[i] * amps[j].conj()))
}

/// `sum_s w_s |phi_s><phi_s|`.
pub fn convex_mix(e: &Ensemble) -> DensityOperator {
    let n = e.dim();
    let mut acc = Matrix::zeros(n, n);
    for (w, k) in e.iter() {
        acc = &acc + &projector(k).into_matrix().scale_real(w);
    }
    DensityOperator::from_matrix_unchecked(acc)
}

pub fn partial_trace(rho: &DensityOperator, dims: BipartiteDims, keep: Subsystem) -> Result<DensityOperator> {
    dims.check(rho.dim())?;
    Ok(DensityOperator::from_matrix_unchecked(trace_out(rho.matrix(), dims, keep)))
}

fn trace_out(m: &Matrix, dims: BipartiteDims, keep: Subsystem) -> Matrix {
    let BipartiteDims { a: da, b: db } = dims;
    match keep {
        Subsystem::A => Matrix::from_fn(da, da, |i, j| (0..db).map(|k| m.get(i * db + k, j * db + k)).sum()),
        Subsystem::B => Matrix::from_fn(db, db, |k, l| (0..da).map(|i| m.get(i * db + k, i * db + l)).sum()),
    }
}

/// Reduced state of a pure joint state, computed from the amplitudes
/// without forming the joint projector.
pub fn reduced_state(psi: &Ket, dims: BipartiteDims, keep: Subsystem) -> Result<DensityOperator> {
    dims.check(psi.dim())?;
    let amp = |i: usize, k: usize| psi.amps()[i * dims.b + k];
    let m = match keep {
        Subsystem::A => Matrix::from_fn(dims.a, dims.a, |i, j| (0..dims.b).map(|k| amp(i, k) * amp(j, k).conj()).sum()),
        Subsystem::B => Matrix::from_fn(dims.b, dims.b, |k, l| (0..dims.a).map(|i| amp(i, k) * amp(i, l).conj()).sum()),
    };
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// `Tr(rho^2)`, evaluated as the squared Frobenius norm of the Hermitian `rho`.
pub fn purity(rho: &DensityOperator) -> f64 {
    rho.matrix().data().iter().map(|z| z.norm_sqr()).sum()
}

/// `||rho^2 - rho||_F <= tol.abs + tol.rel`.
pub fn is_pure(rho: &DensityOperator, tol: &Tolerance) -> bool {
    let m = rho.matrix();
    tol.admits((m * m).distance(m), 1.0)
}

/// `||rho - rho_A (x) rho_B||_F <= tol.abs + tol.rel`.
pub fn is_uncorrelated(rho: &DensityOperator, dims: BipartiteDims, tol: &Tolerance) -> Result<bool> {
    Ok(tol.admits(correlation_gap(rho, dims)?, 1.0))
}

/// `||rho - rho_A (x) rho_B||_F`.
pub fn correlation_gap(rho: &DensityOperator, dims: BipartiteDims) -> Result<f64> {
    let a = partial_trace(rho, dims, Subsystem::A)?;
    let b = partial_trace(rho, dims, Subsystem::B)?;
    Ok(rho.matrix().distance(&a.matrix().tensor(b.matrix())))
}
