//! Random states and unitaries for the verification suites.
//!
//! Kets and unitaries are Haar distributed (normalized complex Gaussians and
//! phase-corrected Gram-Schmidt of a Ginibre matrix). Density operators are
//! `G G^dagger / Tr` for a `dim x rank` Ginibre `G`, which has rank `rank`
//! with probability one.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{orthogonalize_against, Matrix, C64};
use crate::states::{BipartiteDims, DensityOperator, Ket};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    (0..dim).map(|_| gaussian(rng)).collect()
}

pub fn ket<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Ket {
    loop {
        if let Ok(k) = Ket::normalized(gaussian_vector(rng, dim)) {
            return k;
        }
    }
}

/// Haar-random `n x n` unitary.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
    while columns.len() < n {
        if let Some(v) = orthogonalize_against(gaussian_vector(rng, n), &columns) {
            columns.push(v);
        }
    }
    Matrix::from_columns(&columns)
}

/// Density operator of the given rank (`1 <= rank <= dim`).
pub fn density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityOperator {
    assert!(rank >= 1 && rank <= dim, "rank {rank} outside 1..={dim}");
    let g = Matrix::from_fn(dim, rank, |_, _| gaussian(rng));
    let m = &g * &g.dagger();
    let trace = m.trace().re;
    let mut m = m.scale_real(1.0 / trace);
    // exact Hermiticity
    for i in 0..dim {
        for j in i..dim {
            let z = 0.5 * (m.get(i, j) + m.get(j, i).conj());
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    DensityOperator::from_matrix_unchecked(m)
}

/// Joint ket on `dims` with Schmidt rank `rank` (generic coefficients).
pub fn bipartite_ket<R: Rng + ?Sized>(rng: &mut R, dims: BipartiteDims, rank: usize) -> Ket {
    assert!(rank >= 1 && rank <= dims.a.min(dims.b));
    loop {
        let mut amps = vec![C64::new(0.0, 0.0); dims.total()];
        for _ in 0..rank {
            let a = gaussian_vector(rng, dims.a);
            let b = gaussian_vector(rng, dims.b);
            for i in 0..dims.a {
                for k in 0..dims.b {
                    amps[i * dims.b + k] += a[i] * b[k];
                }
            }
        }
        if let Ok(k) = Ket::normalized(amps) {
            return k;
        }
    }
}

/// Probability vector of length `n` with entries bounded away from zero.
pub fn weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}
