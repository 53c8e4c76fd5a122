use super::eigen::jacobi_rotation;
use super::matrix::{complete_basis, fix_phase, norm, orthogonalize_against, Matrix, C64, ZERO};
use super::Tolerance;

const MAX_SWEEPS: usize = 100;

/// Thin singular value decomposition `m = left * diag(singulars) * right^dagger`
/// with `k = min(rows, cols)` singular triples.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x k`, orthonormal columns.
    pub left: Matrix,
    /// Descending, non-negative.
    pub singulars: Vec<f64>,
    /// `cols x k`, orthonormal columns.
    pub right: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let sigma = Matrix::diag(&self.singulars);
        &(&self.left * &sigma) * &self.right.dagger()
    }
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Left singular vectors are phase-fixed (leading entry above `tol.abs`
/// real and positive); each right vector carries the same phase so the
/// product is unchanged. Left vectors belonging to numerically zero
/// singular values are completed from the standard basis.
pub fn svd(m: &Matrix, tol: &Tolerance) -> Svd {
    let (mut left, singulars, mut right) = if m.rows() >= m.cols() {
        svd_tall(m)
    } else {
        let (u, s, v) = svd_tall(&m.dagger());
        (v, s, u)
    };
    for j in 0..singulars.len() {
        let mut u = left.col(j);
        let phase = fix_phase(&mut u, tol.abs);
        for (i, z) in u.into_iter().enumerate() {
            left.set(i, j, z);
        }
        for i in 0..right.rows() {
            right.set(i, j, right.get(i, j) * phase);
        }
    }
    Svd { left, singulars, right }
}

/// Requires `rows >= cols`. Returns `(left, singulars, right)`.
fn svd_tall(m: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let (rows, n) = m.shape();
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| m.col(j)).collect();
    let mut v: Vec<Vec<C64>> =
        (0..n).map(|j| (0..n).map(|i| if i == j { C64::new(1.0, 0.0) } else { ZERO }).collect()).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == ZERO {
                    continue;
                }
                rotated = true;
                let [gpp, gpq, gqp, gqq] = jacobi_rotation(alpha, beta, gamma);
                for cols in [&mut w, &mut v] {
                    let (head, tail) = cols.split_at_mut(q);
                    for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                        let (a, b) = (*x, *y);
                        *x = a * gpp + b * gqp;
                        *y = a * gpq + b * gqq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = w.iter().map(|col| norm(col)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let singulars: Vec<f64> = order.iter().map(|&i| norms[i]).collect();

    let cutoff = singulars.first().copied().unwrap_or(0.0) * (rows as f64) * f64::EPSILON;
    // small singular values leave w[i] with large relative error, so the
    // kept columns are re-orthogonalized in descending order
    let mut left_cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &i in order.iter().filter(|&&i| norms[i] > cutoff && norms[i] > 0.0) {
        match orthogonalize_against(w[i].clone(), &left_cols) {
            Some(u) => left_cols.push(u),
            None => break,
        }
    }
    if left_cols.len() < n {
        left_cols = complete_basis(&left_cols, rows);
        left_cols.truncate(n);
    }
    let right_cols: Vec<Vec<C64>> = order.iter().map(|&i| v[i].clone()).collect();
    (Matrix::from_columns(&left_cols), singulars, Matrix::from_columns(&right_cols))
}
