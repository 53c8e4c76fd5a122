use std::cmp::Ordering;

use super::matrix::{fix_phase, Matrix, C64, ONE, ZERO};
use super::Tolerance;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `m = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: Matrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }

    pub fn reconstruct(&self) -> Matrix {
        let lambda = Matrix::diag(&self.values);
        &(&self.vectors * &lambda) * &self.vectors.dagger()
    }
}

/// Complex Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come back in descending order. Each eigenvector is
/// phase-fixed (leading entry above `tol.abs` real and positive); inside a
/// cluster of eigenvalues closer than `max(tol.abs, tol.rel * max|lambda|)`
/// the vectors are ordered lexicographically by descending entry magnitude.
pub fn eig_hermitian(m: &Matrix, tol: &Tolerance) -> Result<HermitianEigen> {
    let Some(residual) = m.hermiticity_residual() else {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    };
    let scale = m.frobenius_norm();
    if !tol.admits(residual, scale) {
        return Err(Error::NotHermitian { residual });
    }

    let n = m.rows();
    // work on the exactly Hermitian part
    let mut a = (m + &m.dagger()).scale_real(0.5);
    let mut v = Matrix::identity(n);

    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= f64::EPSILON * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).re.total_cmp(&a.get(i, i).re));
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut columns: Vec<Vec<C64>> = order
        .iter()
        .map(|&i| {
            let mut col = v.col(i);
            fix_phase(&mut col, tol.abs);
            col
        })
        .collect();

    let biggest = values.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let gap = tol.abs.max(tol.rel * biggest);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end - 1] - values[end]).abs() <= gap {
            end += 1;
        }
        columns[start..end].sort_by(|x, y| magnitude_order(x, y));
        start = end;
    }

    Ok(HermitianEigen { values, vectors: Matrix::from_columns(&columns) })
}

/// Lexicographic on `(-|v_1|, -|v_2|, ...)`.
fn magnitude_order(x: &[C64], y: &[C64]) -> Ordering {
    x.iter().zip(y).map(|(a, b)| b.norm().total_cmp(&a.norm())).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a.get(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Unitary `G` acting on coordinates `(p, q)` such that `G^dagger H G` is
/// diagonal for the 2x2 Hermitian block `H = [[alpha, b], [b*, beta]]`.
/// Returned as `[g_pp, g_pq, g_qp, g_qq]`.
pub(super) fn jacobi_rotation(alpha: f64, beta: f64, b: C64) -> [C64; 4] {
    let mag = b.norm();
    // unit phase of b; D = diag(1, conj(u)) makes the block real symmetric
    let u = C64::from_polar(1.0, b.arg());
    let theta = (beta - alpha) / (2.0 * mag);
    let t =
        if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    [ONE * c, ONE * s, -u.conj() * s, u.conj() * c]
}

fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let b = a.get(p, q);
    if b == ZERO {
        return;
    }
    let [gpp, gpq, gqp, gqq] = jacobi_rotation(a.get(p, p).re, a.get(q, q).re, b);
    let n = a.rows();
    for k in 0..n {
        let (x, y) = (a.get(k, p), a.get(k, q));
        a.set(k, p, x * gpp + y * gqp);
        a.set(k, q, x * gpq + y * gqq);
        let (x, y) = (v.get(k, p), v.get(k, q));
        v.set(k, p, x * gpp + y * gqp);
        v.set(k, q, x * gpq + y * gqq);
    }
    for k in 0..n {
        let (x, y) = (a.get(p, k), a.get(q, k));
        a.set(p, k, gpp.conj() * x + gqp.conj() * y);
        a.set(q, k, gpq.conj() * x + gqq.conj() * y);
    }
    a.set(p, q, ZERO);
    a.set(q, p, ZERO);
    a.set(p, p, C64::new(a.get(p, p).re, 0.0));
    a.set(q, q, C64::new(a.get(q, q).re, 0.0));
}
