//! Schmidt decomposition, purification, and steering of a purification into
//! any chosen ensemble for its reduced state.
//!
//! The constructions follow the usual chain: a pure joint state is written
//! as `sum_j sqrt(w_j) |p_j>|b_j>` by an SVD of its coefficient matrix; two
//! joint states with the same reduced state on A therefore differ only by a
//! unitary on B ([`lemma_unitary`]); and any decomposition
//! `rho_A = sum_j f_j |phi_j><phi_j|` is reached by measuring B in the
//! orthonormal basis `c_j = U d_j` ([`ghjw_steer`]).

use crate::error::{Error, Result};
use crate::numerics::{complete_basis, orthogonalize_against, svd, Matrix, Tolerance, C64, ZERO};
use crate::states::{convex_mix, reduced_state, BipartiteDims, DensityOperator, Ensemble, Ket, Subsystem};

/// Singular values at or below this are not Schmidt terms.
pub const DEFAULT_SCHMIDT_CUTOFF: f64 = 1e-12;

/// `psi = sum_s coeffs[s] * left[s] (x) right[s]` with orthonormal `left`
/// and `right` and strictly positive, descending `coeffs`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub dims: BipartiteDims,
    pub coeffs: Vec<f64>,
    pub left: Vec<Ket>,
    pub right: Vec<Ket>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// Amplitudes of `sum_s c_s left_s (x) right_s` (not renormalized).
    pub fn reconstruct(&self) -> Vec<C64> {
        let mut amps = vec![ZERO; self.dims.total()];
        for ((c, p), a) in self.coeffs.iter().zip(&self.left).zip(&self.right) {
            for (slot, z) in amps.iter_mut().zip(p.tensor(a).amps()) {
                *slot += z * c;
            }
        }
        amps
    }

    pub fn reconstruction_error(&self, psi: &Ket) -> f64 {
        psi.amps().iter().zip(self.reconstruct()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

pub fn schmidt(psi: &Ket, dims: BipartiteDims, cutoff: f64) -> Result<SchmidtDecomposition> {
    dims.check(psi.dim())?;
    let cutoff = if cutoff.is_finite() && cutoff >= 0.0 { cutoff } else { DEFAULT_SCHMIDT_CUTOFF };
    let coefficients = Matrix::new(dims.a, dims.b, psi.amps().to_vec())?;
    let decomposition = svd(&coefficients, &Tolerance::DEFAULT);

    let mut coeffs = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (s, &sigma) in decomposition.singulars.iter().enumerate() {
        if sigma <= cutoff {
            break;
        }
        coeffs.push(sigma);
        left.push(Ket::new(decomposition.left.col(s))?);
        // psi_ik = sum_s sigma_s U_is conj(V_ks), so the B-side ket is conj(V_s)
        right.push(Ket::new(decomposition.right.col(s).iter().map(|z| z.conj()).collect())?);
    }
    Ok(SchmidtDecomposition { dims, coeffs, left, right })
}

/// Pure joint state whose reduced state on the first factor is the input.
#[derive(Debug, Clone)]
pub struct Purification {
    pub state: Ket,
    pub dims: BipartiteDims,
}

/// `sum_j sqrt(w_j) |p_j> (x) |e_j>` over the eigenpairs with `w_j > tol.abs`.
/// The ancilla dimension equals that numerical rank.
pub fn purify(rho: &DensityOperator, tol: &Tolerance) -> Purification {
    let spectrum = rho.spectrum(tol);
    let rank = spectrum.values.iter().filter(|&&w| w > tol.abs).count().max(1);
    build_purification(rho.dim(), &spectrum.values, &spectrum.vectors, rank, rank)
}

/// Like [`purify`] but embeds the ancilla into dimension `ancilla_dim`
/// (extra basis states carry zero amplitude).
pub fn purify_with_ancilla(rho: &DensityOperator, ancilla_dim: usize, tol: &Tolerance) -> Result<Purification> {
    let spectrum = rho.spectrum(tol);
    let rank = spectrum.values.iter().filter(|&&w| w > tol.abs).count().max(1);
    if ancilla_dim < rank {
        return Err(Error::AncillaTooSmall { kets: rank, ancilla_dim });
    }
    Ok(build_purification(rho.dim(), &spectrum.values, &spectrum.vectors, rank, ancilla_dim))
}

fn build_purification(dim: usize, values: &[f64], vectors: &Matrix, rank: usize, ancilla_dim: usize) -> Purification {
    let mut amps = vec![ZERO; dim * ancilla_dim];
    for j in 0..rank {
        let root = values[j].max(0.0).sqrt();
        for i in 0..dim {
            amps[i * ancilla_dim + j] = vectors.get(i, j) * root;
        }
    }
    let state = Ket::normalized(amps).expect("a density operator has positive trace");
    Purification { state, dims: BipartiteDims { a: dim, b: ancilla_dim } }
}

/// Applies `op` to one factor of a joint vector: `(op (x) I) psi` or `(I (x) op) psi`.
pub fn apply_local(op: &Matrix, psi: &[C64], dims: BipartiteDims, on: Subsystem) -> Result<Vec<C64>> {
    dims.check(psi.len())?;
    let factor = match on {
        Subsystem::A => dims.a,
        Subsystem::B => dims.b,
    };
    if op.shape() != (factor, factor) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on a factor of dimension {factor}",
            op.rows(),
            op.cols()
        )));
    }
    let BipartiteDims { a: da, b: db } = dims;
    let mut out = vec![ZERO; psi.len()];
    for i in 0..da {
        for k in 0..db {
            out[i * db + k] = match on {
                Subsystem::B => (0..db).map(|l| op.get(k, l) * psi[i * db + l]).sum(),
                Subsystem::A => (0..da).map(|l| op.get(i, l) * psi[l * db + k]).sum(),
            };
        }
    }
    Ok(out)
}

/// Unnormalized state of A left after B is found in `c`: `(I (x) <c|) psi`.
pub fn contract_ancilla(psi: &[C64], dims: BipartiteDims, c: &[C64]) -> Vec<C64> {
    (0..dims.a).map(|i| (0..dims.b).map(|k| c[k].conj() * psi[i * dims.b + k]).sum()).collect()
}

/// Unitary `U` on B with `(I (x) U) phi = psi`, for two joint states with
/// the same reduced state on A.
///
/// Built as in the constructive proof: with the Schmidt basis `p_j` of
/// `psi`, write `psi = sum_j p_j (x) beta_j` and `phi = sum_j p_j (x) gamma_j`,
/// normalize both families, extend them to bases of B from the standard
/// basis in index order and set `U = sum_s |b_s><c_s|`.
pub fn lemma_unitary(psi: &Ket, phi: &Ket, dims: BipartiteDims, tol: &Tolerance) -> Result<Matrix> {
    dims.check(psi.dim())?;
    dims.check(phi.dim())?;
    let gap = reduced_state(psi, dims, Subsystem::A)?.distance(&reduced_state(phi, dims, Subsystem::A)?);
    if !tol.admits(gap, 1.0) {
        return Err(Error::MarginalsDiffer { gap });
    }

    let form = schmidt(psi, dims, DEFAULT_SCHMIDT_CUTOFF)?;
    let mut targets: Vec<Vec<C64>> = Vec::with_capacity(form.rank());
    let mut sources: Vec<Vec<C64>> = Vec::with_capacity(form.rank());
    for ((coeff, p), b) in form.coeffs.iter().zip(&form.left).zip(&form.right) {
        let gamma: Vec<C64> = partial_bra(p, phi.amps(), dims).into_iter().map(|z| z / coeff).collect();
        let (Some(b), Some(c)) =
            (orthogonalize_against(b.amps().to_vec(), &targets), orthogonalize_against(gamma, &sources))
        else {
            continue;
        };
        targets.push(b);
        sources.push(c);
    }
    let targets = complete_basis(&targets, dims.b);
    let sources = complete_basis(&sources, dims.b);
    Ok(&Matrix::from_columns(&targets) * &Matrix::from_columns(&sources).dagger())
}

/// `(<p| (x) I) psi`, a vector on B.
fn partial_bra(p: &Ket, psi: &[C64], dims: BipartiteDims) -> Vec<C64> {
    (0..dims.b).map(|k| (0..dims.a).map(|i| p.amps()[i].conj() * psi[i * dims.b + k]).sum()).collect()
}

/// Ancilla basis realizing a chosen ensemble for the reduced state.
#[derive(Debug, Clone)]
pub struct SteeringResult {
    /// `c_j`, one per ensemble member, orthonormal in B.
    pub ancilla_basis: Vec<Ket>,
    /// `U` on B with `c_j = U d_j` (`d_j` the standard basis).
    pub unitary: Matrix,
    /// `||psi - sum_j sqrt(f_j) phi_j (x) c_j||`.
    pub reconstruction_error: f64,
}

/// Finds orthonormal `c_j` in B with `psi = sum_j sqrt(f_j) phi_j (x) c_j`
/// for the target ensemble `{f_j, phi_j}` of the reduced state of `psi`.
pub fn ghjw_steer(psi: &Ket, dims: BipartiteDims, target: &Ensemble, tol: &Tolerance) -> Result<SteeringResult> {
    dims.check(psi.dim())?;
    if target.dim() != dims.a {
        return Err(Error::DimensionMismatch(format!(
            "ensemble kets have dimension {}, subsystem A has {}",
            target.dim(),
            dims.a
        )));
    }
    let gap = convex_mix(target).distance(&reduced_state(psi, dims, Subsystem::A)?);
    if !tol.admits(gap, 1.0) {
        return Err(Error::NotADecomposition { gap });
    }
    let m = target.len();
    if m > dims.b {
        return Err(Error::AncillaTooSmall { kets: m, ancilla_dim: dims.b });
    }

    let reference = Ket::new(ensemble_state(target, dims, |j| standard(dims.b, j)))?;
    let unitary = lemma_unitary(psi, &reference, dims, tol).map_err(|e| match e {
        Error::MarginalsDiffer { gap } => Error::NotADecomposition { gap },
        other => other,
    })?;
    let ancilla_basis = (0..m).map(|j| Ket::new(unitary.col(j))).collect::<Result<Vec<_>>>()?;
    let rebuilt = ensemble_state(target, dims, |j| ancilla_basis[j].amps().to_vec());
    let reconstruction_error = psi.amps().iter().zip(&rebuilt).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    Ok(SteeringResult { ancilla_basis, unitary, reconstruction_error })
}

fn standard(dim: usize, j: usize) -> Vec<C64> {
    Ket::basis(dim, j).into_amps()
}

/// `sum_j sqrt(f_j) phi_j (x) anc(j)`.
fn ensemble_state(target: &Ensemble, dims: BipartiteDims, anc: impl Fn(usize) -> Vec<C64>) -> Vec<C64> {
    let mut amps = vec![ZERO; dims.total()];
    for (j, (f, phi)) in target.iter().enumerate() {
        let root = f.sqrt();
        let c = anc(j);
        for i in 0..dims.a {
            for k in 0..dims.b {
                amps[i * dims.b + k] += phi.amps()[i] * c[k] * root;
            }
        }
    }
    amps
}

/// A purification of `rho` together with the ancilla basis that steers it
/// into a given decomposition of `rho`.
#[derive(Debug, Clone)]
pub struct AncillaRealization {
    pub state: Ket,
    pub dims: BipartiteDims,
    pub ancilla_basis: Vec<Ket>,
    pub reconstruction_error: f64,
}

/// Purifies `rho` and steers the purification into `decomposition`. The
/// ancilla is the minimal one unless the decomposition has more members
/// than `rank(rho)`, in which case it is enlarged to that count.
pub fn ancilla_realize(rho: &DensityOperator, decomposition: &Ensemble, tol: &Tolerance) -> Result<AncillaRealization> {
    if decomposition.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ensemble kets have dimension {}, state has {}",
            decomposition.dim(),
            rho.dim()
        )));
    }
    let gap = convex_mix(decomposition).distance(rho);
    if !tol.admits(gap, 1.0) {
        return Err(Error::NotADecomposition { gap });
    }
    let minimal = purify(rho, tol);
    let purification = if decomposition.len() > minimal.dims.b {
        purify_with_ancilla(rho, decomposition.len(), tol)?
    } else {
        minimal
    };
    let steering = ghjw_steer(&purification.state, purification.dims, decomposition, tol)?;
    Ok(AncillaRealization {
        state: purification.state,
        dims: purification.dims,
        ancilla_basis: steering.ancilla_basis,
        reconstruction_error: steering.reconstruction_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ONE;
    use crate::states::{partial_trace, projector};

    const TOL: Tolerance = Tolerance::DEFAULT;
    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn dims(a: usize, b: usize) -> BipartiteDims {
        BipartiteDims::new(a, b).unwrap()
    }

    fn plus() -> Ket {
        Ket::from_real(&[H, H]).unwrap()
    }

    fn minus() -> Ket {
        Ket::from_real(&[H, -H]).unwrap()
    }

    fn bell() -> Ket {
        Ket::from_real(&[H, 0., 0., H]).unwrap()
    }

    fn close(a: &[C64], b: &[C64], eps: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() <= eps)
    }

    #[test]
    fn schmidt_of_product_state() {
        let psi = Ket::basis(2, 0).tensor(&Ket::basis(2, 1));
        let s = schmidt(&psi, dims(2, 2), DEFAULT_SCHMIDT_CUTOFF).unwrap();
        assert_eq!(s.coeffs, vec![1.0]);
        assert_eq!(s.left[0], Ket::basis(2, 0));
        assert_eq!(s.right[0], Ket::basis(2, 1));
    }

    #[test]
    fn schmidt_of_bell_state() {
        let s = schmidt(&bell(), dims(2, 2), DEFAULT_SCHMIDT_CUTOFF).unwrap();
        assert_eq!(s.rank(), 2);
        assert!(s.coeffs.iter().all(|c| (c - H).abs() < 1e-15));
        assert!(s.reconstruction_error(&bell()) < 1e-15);
    }

    #[test]
    fn schmidt_of_diagonal_coefficients() {
        // coefficient matrix diag(sqrt .6, sqrt .4) is its own SVD
        let psi = Ket::from_real(&[0.6f64.sqrt(), 0., 0., 0.4f64.sqrt()]).unwrap();
        let s = schmidt(&psi, dims(2, 2), DEFAULT_SCHMIDT_CUTOFF).unwrap();
        assert!((s.coeffs[0] - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((s.coeffs[1] - 0.4f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.left, vec![Ket::basis(2, 0), Ket::basis(2, 1)]);
        assert_eq!(s.right, vec![Ket::basis(2, 0), Ket::basis(2, 1)]);
    }

    #[test]
    fn schmidt_rejects_wrong_dims() {
        assert!(matches!(schmidt(&bell(), dims(3, 2), DEFAULT_SCHMIDT_CUTOFF), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn purify_pure_input() {
        let rho = DensityOperator::diagonal(&[1.0, 0.0], &TOL).unwrap();
        let p = purify(&rho, &TOL);
        assert_eq!(p.dims, dims(2, 1));
        assert_eq!(p.state.amps(), &[ONE, ZERO]);
    }

    #[test]
    fn purify_maximally_mixed() {
        let p = purify(&DensityOperator::maximally_mixed(2), &TOL);
        assert_eq!(p.dims, dims(2, 2));
        assert!(p.state.equal_up_to_phase(&bell(), &TOL));
    }

    #[test]
    fn purify_diagonal() {
        let rho = DensityOperator::diagonal(&[0.6, 0.4], &TOL).unwrap();
        let p = purify(&rho, &TOL);
        let expected = Ket::from_real(&[0.6f64.sqrt(), 0., 0., 0.4f64.sqrt()]).unwrap();
        assert!(p.state.distance(&expected) < 1e-15);
        let back = partial_trace(&projector(&p.state), p.dims, Subsystem::A).unwrap();
        assert!(back.distance(&rho) < 1e-15);
    }

    #[test]
    fn purify_with_small_ancilla_fails() {
        let rho = DensityOperator::maximally_mixed(3);
        assert!(matches!(purify_with_ancilla(&rho, 2, &TOL), Err(Error::AncillaTooSmall { kets: 3, ancilla_dim: 2 })));
        let p = purify_with_ancilla(&rho, 5, &TOL).unwrap();
        assert_eq!(p.dims, dims(3, 5));
    }

    #[test]
    fn lemma_unitary_identity_case() {
        let u = lemma_unitary(&bell(), &bell(), dims(2, 2), &TOL).unwrap();
        assert!(u.distance(&Matrix::identity(2)) < 1e-14);
    }

    #[test]
    fn lemma_unitary_hadamard_type() {
        // (|0 +> + |1 ->)/sqrt2 -> Bell requires U|+> = |0>, U|-> = |1>
        let phi = Ket::normalized(
            [Ket::basis(2, 0).tensor(&plus()), Ket::basis(2, 1).tensor(&minus())]
                .iter()
                .fold(vec![ZERO; 4], |acc, k| acc.iter().zip(k.amps()).map(|(a, b)| a + b).collect()),
        )
        .unwrap();
        let d = dims(2, 2);
        let u = lemma_unitary(&bell(), &phi, d, &TOL).unwrap();
        assert!(close(&u.apply(plus().amps()), Ket::basis(2, 0).amps(), 1e-14));
        assert!(close(&u.apply(minus().amps()), Ket::basis(2, 1).amps(), 1e-14));
        let mapped = apply_local(&u, phi.amps(), d, Subsystem::B).unwrap();
        assert!(close(&mapped, bell().amps(), 1e-14));
    }

    #[test]
    fn lemma_unitary_completes_the_complement() {
        let d = dims(2, 2);
        let psi = Ket::basis(2, 0).tensor(&Ket::basis(2, 0));
        let phi = Ket::basis(2, 0).tensor(&Ket::basis(2, 1));
        let u = lemma_unitary(&psi, &phi, d, &TOL).unwrap();
        assert!((&u.dagger() * &u).distance(&Matrix::identity(2)) < 1e-14);
        let mapped = apply_local(&u, phi.amps(), d, Subsystem::B).unwrap();
        assert!(close(&mapped, psi.amps(), 1e-14));
    }

    #[test]
    fn lemma_unitary_rejects_different_marginals() {
        let psi = Ket::basis(4, 0);
        let phi = Ket::basis(4, 2);
        assert!(matches!(lemma_unitary(&psi, &phi, dims(2, 2), &TOL), Err(Error::MarginalsDiffer { .. })));
    }

    #[test]
    fn steer_bell_into_plus_minus() {
        // Bell = (|++> + |-->)/sqrt2, so c = {|+>, |->}
        let target = Ensemble::new(vec![(0.5, plus()), (0.5, minus())]).unwrap();
        let r = ghjw_steer(&bell(), dims(2, 2), &target, &TOL).unwrap();
        assert!(r.reconstruction_error < 1e-14);
        assert!(close(r.ancilla_basis[0].amps(), plus().amps(), 1e-14));
        assert!(close(r.ancilla_basis[1].amps(), minus().amps(), 1e-14));
    }

    #[test]
    fn steer_bell_into_own_schmidt_ensemble() {
        let target = Ensemble::new(vec![(0.5, Ket::basis(2, 0)), (0.5, Ket::basis(2, 1))]).unwrap();
        let r = ghjw_steer(&bell(), dims(2, 2), &target, &TOL).unwrap();
        assert!(r.unitary.distance(&Matrix::identity(2)) < 1e-14);
        assert!(r.reconstruction_error < 1e-14);
    }

    #[test]
    fn steer_unequal_weights() {
        let psi = Ket::from_real(&[0.6f64.sqrt(), 0., 0., 0.4f64.sqrt()]).unwrap();
        let target = Ensemble::new(vec![(0.6, Ket::basis(2, 0)), (0.4, Ket::basis(2, 1))]).unwrap();
        let r = ghjw_steer(&psi, dims(2, 2), &target, &TOL).unwrap();
        assert!(r.reconstruction_error <= 1e-10);
        assert!(close(r.ancilla_basis[0].amps(), Ket::basis(2, 0).amps(), 1e-14));
        assert!(close(r.ancilla_basis[1].amps(), Ket::basis(2, 1).amps(), 1e-14));
    }

    #[test]
    fn steer_errors() {
        let wrong = Ensemble::new(vec![(0.9, Ket::basis(2, 0)), (0.1, Ket::basis(2, 1))]).unwrap();
        assert!(matches!(ghjw_steer(&bell(), dims(2, 2), &wrong, &TOL), Err(Error::NotADecomposition { .. })));
        // trine ensemble for I/2 needs three ancilla levels
        let trine: Vec<(f64, Ket)> = (0..3)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                (1.0 / 3.0, Ket::from_real(&[(angle / 2.0).cos(), (angle / 2.0).sin()]).unwrap())
            })
            .collect();
        let trine = Ensemble::new(trine).unwrap();
        assert!(matches!(
            ghjw_steer(&bell(), dims(2, 2), &trine, &TOL),
            Err(Error::AncillaTooSmall { kets: 3, ancilla_dim: 2 })
        ));
        let realized = ancilla_realize(&DensityOperator::maximally_mixed(2), &trine, &TOL).unwrap();
        assert_eq!(realized.dims, dims(2, 3));
        assert!(realized.reconstruction_error < 1e-12);
    }

    #[test]
    fn ancilla_realize_examples() {
        let rho = DensityOperator::diagonal(&[1.0, 0.0], &TOL).unwrap();
        let r = ancilla_realize(&rho, &Ensemble::new(vec![(1.0, Ket::basis(2, 0))]).unwrap(), &TOL).unwrap();
        assert_eq!(r.dims, dims(2, 1));
        assert!(close(r.state.amps(), &[ONE, ZERO], 1e-15));

        let pm = Ensemble::new(vec![(0.5, plus()), (0.5, minus())]).unwrap();
        let r = ancilla_realize(&DensityOperator::maximally_mixed(2), &pm, &TOL).unwrap();
        let overlap = r.ancilla_basis[0].inner(&r.ancilla_basis[1]).norm();
        assert!(overlap < 1e-14);
        assert!(r.reconstruction_error < 1e-14);

        let skew = Ensemble::new(vec![(0.5, Ket::basis(2, 0)), (0.5, plus())]).unwrap();
        let rho = convex_mix(&skew);
        let r = ancilla_realize(&rho, &skew, &TOL).unwrap();
        assert!(r.reconstruction_error <= 1e-10);
        for (j, (w, phi)) in skew.iter().enumerate() {
            let v = contract_ancilla(r.state.amps(), r.dims, r.ancilla_basis[j].amps());
            let weight: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((weight - w).abs() < 1e-12);
            assert!(Ket::normalized(v).unwrap().equal_up_to_phase(phi, &TOL));
        }
    }
}
