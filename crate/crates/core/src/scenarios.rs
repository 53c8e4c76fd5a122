//! Worked constructions about how alternatives combine into states.
//!
//! Indistinguishable alternatives add as vectors, distinguishable ones as
//! projectors. The scenarios below build both kinds of state for the same
//! physical setup and record the quantities that tell them apart.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Tolerance, C64, ZERO};
use crate::states::{
    convex_mix, correlation_gap, is_pure, projector, purity, reduced_state, BipartiteDims, DensityOperator, Ensemble,
    Ket, Subsystem, NORMALIZATION_SLACK,
};

/// Environment kets with `|<eta_i|eta_j>| >= 1 - COLLINEAR_SLACK` for every
/// pair count as collinear.
pub const COLLINEAR_SLACK: f64 = 1e-9;

/// Amplitude-weighted preparations `gamma_s |alpha_s> (x) |eta_s>` of a
/// system together with its environment.
#[derive(Debug, Clone)]
pub struct PreparationModel {
    entries: Vec<(C64, Ket, Ket)>,
}

impl PreparationModel {
    pub fn new(entries: Vec<(C64, Ket, Ket)>) -> Result<Self> {
        let Some((_, alpha0, eta0)) = entries.first() else {
            return Err(Error::DimensionMismatch("preparation model has no entries".into()));
        };
        let (ds, de) = (alpha0.dim(), eta0.dim());
        if entries.iter().any(|(_, a, e)| a.dim() != ds || e.dim() != de) {
            return Err(Error::DimensionMismatch(
                "all system kets and all environment kets must share a dimension".into(),
            ));
        }
        if let Some(index) = entries.iter().position(|(g, _, _)| !(g.re.is_finite() && g.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        let norm_sqr: f64 = entries.iter().map(|(g, _, _)| g.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(C64, Ket, Ket)] {
        &self.entries
    }

    pub fn dims(&self) -> BipartiteDims {
        let (_, a, e) = &self.entries[0];
        BipartiteDims { a: a.dim(), b: e.dim() }
    }
}

#[derive(Debug, Clone)]
pub enum StateValue {
    Ket(Ket),
    Density(DensityOperator),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The naive product-of-mixtures state is mixed while a pure composite
    /// with identical marginals exists.
    PureCompositeContradictsMixedClaim,
    /// The naive reconstruction is itself pure, nothing to contrast.
    NoContradiction,
    Pure,
    ImproperMixture,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::PureCompositeContradictsMixedClaim => "PureCompositeContradictsMixedClaim",
            Verdict::NoContradiction => "NoContradiction",
            Verdict::Pure => "Pure",
            Verdict::ImproperMixture => "ImproperMixture",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of one scenario run: the states it built, named scalar findings,
/// and a verdict together with the inequality that decided it.
#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub scenario: &'static str,
    pub states: Vec<(String, StateValue)>,
    pub findings: Vec<(String, f64)>,
    pub verdict: Verdict,
    pub verdict_rule: String,
}

impl ScenarioReport {
    fn new(scenario: &'static str) -> Self {
        Self {
            scenario,
            states: Vec::new(),
            findings: Vec::new(),
            verdict: Verdict::NoContradiction,
            verdict_rule: String::new(),
        }
    }

    fn state(&mut self, label: &str, value: StateValue) {
        self.states.push((label.to_string(), value));
    }

    fn finding(&mut self, label: &str, value: f64) {
        assert!(value.is_finite(), "finding {label} is not finite");
        self.findings.push((label.to_string(), value));
    }

    pub fn get_finding(&self, label: &str) -> Option<f64> {
        self.findings.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    pub fn get_state(&self, label: &str) -> Option<&StateValue> {
        self.states.iter().find(|(l, _)| l == label).map(|(_, v)| v)
    }

    pub fn density(&self, label: &str) -> Option<&DensityOperator> {
        match self.get_state(label)? {
            StateValue::Density(d) => Some(d),
            StateValue::Ket(_) => None,
        }
    }
}

/// Indistinguishable alternatives: normalize `sum_s amp_s |ket_s>`.
pub fn combine_indistinguishable(amplitudes: &[C64], kets: &[Ket]) -> Result<Ket> {
    let dim = check_alternatives(amplitudes.len(), kets)?;
    let mut amps = vec![ZERO; dim];
    for (c, k) in amplitudes.iter().zip(kets) {
        for (slot, z) in amps.iter_mut().zip(k.amps()) {
            *slot += c * z;
        }
    }
    Ket::normalized(amps)
}

/// Distinguishable alternatives: `sum_s w_s |ket_s><ket_s|`.
pub fn combine_distinguishable(weights: &[f64], kets: &[Ket]) -> Result<DensityOperator> {
    check_alternatives(weights.len(), kets)?;
    let ensemble = Ensemble::new(weights.iter().copied().zip(kets.iter().cloned()).collect())?;
    Ok(convex_mix(&ensemble))
}

fn check_alternatives(count: usize, kets: &[Ket]) -> Result<usize> {
    if count != kets.len() {
        return Err(Error::DimensionMismatch(format!("{count} coefficients for {} kets", kets.len())));
    }
    let Some(first) = kets.first() else {
        return Err(Error::DimensionMismatch("no alternatives given".into()));
    };
    if kets.iter().any(|k| k.dim() != first.dim()) {
        return Err(Error::DimensionMismatch("alternatives live in different spaces".into()));
    }
    Ok(first.dim())
}

/// `||G - I||_F` for the Gram matrix of `kets`.
pub fn orthonormality_residual(kets: &[Ket]) -> f64 {
    let mut sum = 0.0;
    for (i, x) in kets.iter().enumerate() {
        for (j, y) in kets.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            sum += (x.inner(y) - target).norm_sqr();
        }
    }
    sum.sqrt()
}

fn check_orthonormal(kets: &[Ket], tol: &Tolerance) -> Result<()> {
    let residual = orthonormality_residual(kets);
    if !tol.admits(residual, 1.0) {
        return Err(Error::NotOrthonormal { residual });
    }
    Ok(())
}

pub fn standard_basis(dim: usize) -> Vec<Ket> {
    (0..dim).map(|j| Ket::basis(dim, j)).collect()
}

/// `psi_jk = delta_jk sqrt(a_j)`, the pure state whose two marginals are
/// both `diag(a)` in the chosen bases.
pub fn schmidt_diagonal_coeffs(a: &[f64]) -> Matrix {
    Matrix::from_fn(a.len(), a.len(), |j, k| if j == k { C64::new(a[j].max(0.0).sqrt(), 0.0) } else { ZERO })
}

fn check_weights(w: &[f64], expected_len: usize) -> Result<()> {
    if w.len() != expected_len {
        return Err(Error::DimensionMismatch(format!("{} weights for {expected_len} basis kets", w.len())));
    }
    if let Some(&weight) = w.iter().find(|x| !(x.is_finite() && (0.0..=1.0).contains(*x))) {
        return Err(Error::InvalidWeight { weight });
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_SLACK {
        return Err(Error::WeightsNotNormalized { sum });
    }
    Ok(())
}

fn check_non_degenerate(w: &[f64], tol: &Tolerance) -> Result<()> {
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if tol.admits((w[i] - w[j]).abs(), 1.0) {
                return Err(Error::DegenerateWeights { weights: w.to_vec() });
            }
        }
    }
    Ok(())
}

fn weighted_projectors(weights: &[f64], kets: &[Ket]) -> DensityOperator {
    let dim = kets[0].dim();
    let mut acc = Matrix::zeros(dim, dim);
    for (w, k) in weights.iter().zip(kets) {
        if *w != 0.0 {
            acc = &acc + &projector(k).into_matrix().scale_real(*w);
        }
    }
    DensityOperator::from_matrix_unchecked(acc)
}

/// The four-state reconstruction argument made concrete.
///
/// Given reduced states `sum_j a_j |u_j><u_j|` and `sum_k b_k |v_k><v_k|`,
/// builds the naive mixture `M = sum_jk a_j b_k |u_j v_k><u_j v_k|` (adding
/// projectors) and the pure composite `P = sum_jk psi_jk |u_j v_k>` (adding
/// vectors), checks both have the stated marginals, and reports their
/// purities.
pub fn despagnat_scenario(
    u_basis: &[Ket],
    v_basis: &[Ket],
    a: &[f64],
    b: &[f64],
    psi_coeffs: &Matrix,
    tol: &Tolerance,
) -> Result<ScenarioReport> {
    if u_basis.is_empty() || v_basis.is_empty() {
        return Err(Error::DimensionMismatch("both bases need at least one ket".into()));
    }
    check_weights(a, u_basis.len())?;
    check_weights(b, v_basis.len())?;
    check_non_degenerate(a, tol)?;
    check_non_degenerate(b, tol)?;
    check_alternatives(u_basis.len(), u_basis)?;
    check_alternatives(v_basis.len(), v_basis)?;
    check_orthonormal(u_basis, tol)?;
    check_orthonormal(v_basis, tol)?;
    if psi_coeffs.shape() != (a.len(), b.len()) {
        return Err(Error::DimensionMismatch(format!(
            "coefficient matrix is {}x{}, expected {}x{}",
            psi_coeffs.rows(),
            psi_coeffs.cols(),
            a.len(),
            b.len()
        )));
    }
    let norm_sqr = psi_coeffs.frobenius_norm().powi(2);
    if (norm_sqr - 1.0).abs() > NORMALIZATION_SLACK {
        return Err(Error::NotNormalized { norm_sqr });
    }

    let dims = BipartiteDims::new(u_basis[0].dim(), v_basis[0].dim())?;
    let mut naive = Matrix::zeros(dims.total(), dims.total());
    let mut pure = vec![ZERO; dims.total()];
    let mut expected_purity = 0.0;
    for (j, u) in u_basis.iter().enumerate() {
        for (k, v) in v_basis.iter().enumerate() {
            let uv = u.tensor(v);
            let w = a[j] * b[k];
            expected_purity += w * w;
            if w != 0.0 {
                naive = &naive + &projector(&uv).into_matrix().scale_real(w);
            }
            let c = psi_coeffs.get(j, k);
            for (slot, z) in pure.iter_mut().zip(uv.amps()) {
                *slot += c * z;
            }
        }
    }
    let naive = DensityOperator::from_matrix_unchecked(naive);
    let pure = Ket::new(pure)?;

    let target_a = weighted_projectors(a, u_basis);
    let target_b = weighted_projectors(b, v_basis);
    let pure_a = reduced_state(&pure, dims, Subsystem::A)?;
    let pure_b = reduced_state(&pure, dims, Subsystem::B)?;
    let pure_gap = pure_a.distance(&target_a).max(pure_b.distance(&target_b));
    if !tol.admits(pure_gap, 1.0) {
        return Err(Error::MarginalMismatch { gap: pure_gap });
    }
    let naive_a = crate::states::partial_trace(&naive, dims, Subsystem::A)?;
    let naive_b = crate::states::partial_trace(&naive, dims, Subsystem::B)?;

    let mut report = ScenarioReport::new("despagnat");
    let purity_naive = purity(&naive);
    report.finding("purity_naive", purity_naive);
    report.finding("purity_naive_expected", expected_purity);
    report.finding("purity_pure", purity(&projector(&pure)));
    let gap_a = naive_a.distance(&pure_a);
    let gap_b = naive_b.distance(&pure_b);
    report.finding("marginal_gap_a", gap_a);
    report.finding("marginal_gap_b", gap_b);
    report.finding("correlation_gap_naive", correlation_gap(&naive, dims)?);
    report.finding("correlation_gap_pure", correlation_gap(&projector(&pure), dims)?);

    let threshold = 1.0 - tol.bound(1.0);
    let marginals_agree = tol.admits(gap_a.max(gap_b), 1.0);
    if purity_naive < threshold && marginals_agree {
        report.verdict = Verdict::PureCompositeContradictsMixedClaim;
        report.verdict_rule =
            format!("purity_naive {purity_naive:.12} < {threshold:.12} while marginal gaps <= {:e}", tol.bound(1.0));
    } else {
        report.verdict = Verdict::NoContradiction;
        report.verdict_rule = format!("purity_naive {purity_naive:.12} >= {threshold:.12}");
    }

    report.state("naive_mixture", StateValue::Density(naive));
    report.state("pure_composite", StateValue::Ket(pure));
    report.state("naive_marginal_a", StateValue::Density(naive_a));
    report.state("naive_marginal_b", StateValue::Density(naive_b));
    report.state("pure_marginal_a", StateValue::Density(pure_a));
    report.state("pure_marginal_b", StateValue::Density(pure_b));
    Ok(report)
}

/// Builds `sum_s gamma_s |alpha_s> (x) |eta_s>`, normalizes it and traces out
/// the environment. The system state is pure when the environment kets are
/// collinear, and otherwise whenever `rho_S` passes [`is_pure`].
pub fn prepare_with_environment(model: &PreparationModel, tol: &Tolerance) -> Result<ScenarioReport> {
    let dims = model.dims();
    let mut amps = vec![ZERO; dims.total()];
    for (gamma, alpha, eta) in model.entries() {
        for (slot, z) in amps.iter_mut().zip(alpha.tensor(eta).amps()) {
            *slot += gamma * z;
        }
    }
    let joint_norm = crate::numerics::norm(&amps);
    let joint = Ket::normalized(amps)?;
    let system = reduced_state(&joint, dims, Subsystem::A)?;

    let etas: Vec<&Ket> = model.entries().iter().map(|(_, _, e)| e).collect();
    let mut min_overlap = 1.0_f64;
    for i in 0..etas.len() {
        for j in i + 1..etas.len() {
            min_overlap = min_overlap.min(etas[i].inner(etas[j]).norm());
        }
    }
    let collinear = min_overlap >= 1.0 - COLLINEAR_SLACK;
    let m = system.matrix();
    let idempotency = (m * m).distance(m);

    let mut report = ScenarioReport::new("preparation");
    report.finding("joint_norm", joint_norm);
    report.finding("purity", purity(&system));
    report.finding("idempotency_residual", idempotency);
    report.finding("min_environment_overlap", min_overlap);
    report.finding("environments_collinear", if collinear { 1.0 } else { 0.0 });

    let bound = tol.bound(1.0);
    (report.verdict, report.verdict_rule) = if collinear {
        (Verdict::Pure, format!("min environment overlap {min_overlap:.12} >= 1 - {COLLINEAR_SLACK:e}"))
    } else if is_pure(&system, tol) {
        (Verdict::Pure, format!("||rho^2 - rho||_F {idempotency:e} <= {bound:e}"))
    } else {
        (Verdict::ImproperMixture, format!("||rho^2 - rho||_F {idempotency:e} > {bound:e}"))
    };
    report.state("joint", StateValue::Ket(joint));
    report.state("system", StateValue::Density(system));
    Ok(report)
}

/// Couples system basis state `|s>` to pointer state `|m_s>` and traces out
/// the pointer; compares the result with the projector mixture
/// `sum_s |c_s|^2 |s><s|`.
pub fn premeasurement(system_amps: &[C64], pointer_basis: &[Ket], tol: &Tolerance) -> Result<ScenarioReport> {
    let n = system_amps.len();
    if pointer_basis.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} system amplitudes but {} pointer states",
            pointer_basis.len()
        )));
    }
    let system_ket = Ket::new(system_amps.to_vec())?;
    check_alternatives(n, pointer_basis)?;
    check_orthonormal(pointer_basis, tol)?;

    let dims = BipartiteDims::new(n, pointer_basis[0].dim())?;
    let mut amps = vec![ZERO; dims.total()];
    for (s, (c, pointer)) in system_ket.amps().iter().zip(pointer_basis).enumerate() {
        for (k, z) in pointer.amps().iter().enumerate() {
            amps[s * dims.b + k] = c * z;
        }
    }
    let joint = Ket::new(amps)?;
    let system = reduced_state(&joint, dims, Subsystem::A)?;

    let (weights, kets): (Vec<f64>, Vec<Ket>) = system_ket
        .amps()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(s, c)| (c.norm_sqr(), Ket::basis(n, s)))
        .unzip();
    let appropriate = combine_distinguishable(&weights, &kets)?;

    let m = system.matrix();
    let mut max_off = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max_off = max_off.max(m.get(i, j).norm());
            }
        }
    }
    let gap = system.distance(&appropriate);
    let idempotency = (m * m).distance(m);

    let mut report = ScenarioReport::new("premeasure");
    report.finding("purity", purity(&system));
    report.finding("max_off_diagonal", max_off);
    report.finding("distinguishable_gap", gap);
    report.finding("idempotency_residual", idempotency);
    let bound = tol.bound(1.0);
    (report.verdict, report.verdict_rule) = if is_pure(&system, tol) {
        (Verdict::Pure, format!("||rho^2 - rho||_F {idempotency:e} <= {bound:e}"))
    } else {
        (Verdict::ImproperMixture, format!("||rho^2 - rho||_F {idempotency:e} > {bound:e}"))
    };
    report.state("joint", StateValue::Ket(joint));
    report.state("system", StateValue::Density(system));
    report.state("appropriate_mixture", StateValue::Density(appropriate));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerance = Tolerance::DEFAULT;
    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn plus() -> Ket {
        Ket::from_real(&[H, H]).unwrap()
    }

    #[test]
    fn indistinguishable_examples() {
        let k = combine_indistinguishable(&[r(H), r(H)], &standard_basis(2)).unwrap();
        assert!(k.distance(&plus()) < 1e-15);

        let cancel = combine_indistinguishable(&[r(H), r(-H)], &[plus(), plus()]);
        assert!(matches!(cancel, Err(Error::ZeroVector { .. })));

        let k = combine_indistinguishable(&[r(0.6f64.sqrt()), r(0.4f64.sqrt())], &standard_basis(2)).unwrap();
        assert!((k.amps()[0].re - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((purity(&projector(&k)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_alternative_is_the_ket_up_to_phase() {
        let k = plus();
        let combined = combine_indistinguishable(&[C64::from_polar(0.3, 1.1)], std::slice::from_ref(&k)).unwrap();
        assert!(combined.distance_up_to_phase(&k) < 1e-15);
    }

    #[test]
    fn distinguishable_examples() {
        let d = combine_distinguishable(&[1.0], &[Ket::basis(2, 0)]).unwrap();
        assert_eq!(d.matrix(), &Matrix::diag(&[1.0, 0.0]));
        let d = combine_distinguishable(&[0.5, 0.5], &standard_basis(2)).unwrap();
        assert_eq!(d.matrix(), &Matrix::diag(&[0.5, 0.5]));
        let d = combine_distinguishable(&[0.6, 0.4], &standard_basis(2)).unwrap();
        assert!((purity(&d) - 0.52).abs() < 1e-15);
        assert!(matches!(
            combine_distinguishable(&[0.6, 0.6], &standard_basis(2)),
            Err(Error::WeightsNotNormalized { .. })
        ));
    }

    #[test]
    fn despagnat_standard_example() {
        let a = [0.6, 0.4];
        let basis = standard_basis(2);
        let report = despagnat_scenario(&basis, &basis, &a, &a, &schmidt_diagonal_coeffs(&a), &TOL).unwrap();
        // 0.36^2 + 2 * 0.24^2 + 0.16^2
        assert!((report.get_finding("purity_naive").unwrap() - 0.2704).abs() < 1e-12);
        assert!((report.get_finding("purity_naive_expected").unwrap() - 0.2704).abs() < 1e-12);
        assert!((report.get_finding("purity_pure").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(report.verdict, Verdict::PureCompositeContradictsMixedClaim);
        assert!(report.get_finding("correlation_gap_naive").unwrap() < 1e-12);
        assert!(report.get_finding("correlation_gap_pure").unwrap() > 0.1);
    }

    #[test]
    fn despagnat_marginals_match() {
        let a = [0.7, 0.3];
        let basis = standard_basis(2);
        let report = despagnat_scenario(&basis, &basis, &a, &a, &schmidt_diagonal_coeffs(&a), &TOL).unwrap();
        let expected = Matrix::diag(&a);
        for label in ["naive_marginal_a", "naive_marginal_b", "pure_marginal_a", "pure_marginal_b"] {
            assert!(report.density(label).unwrap().matrix().distance(&expected) < 1e-15, "{label}");
        }
    }

    #[test]
    fn despagnat_errors() {
        let basis = standard_basis(2);
        let half = [0.5, 0.5];
        assert!(matches!(
            despagnat_scenario(&basis, &basis, &half, &half, &schmidt_diagonal_coeffs(&half), &TOL),
            Err(Error::DegenerateWeights { .. })
        ));
        let (a, b) = ([0.7, 0.3], [0.6, 0.4]);
        assert!(matches!(
            despagnat_scenario(&basis, &basis, &a, &b, &schmidt_diagonal_coeffs(&a), &TOL),
            Err(Error::MarginalMismatch { .. })
        ));
        let skewed = [Ket::basis(2, 0), plus()];
        assert!(matches!(
            despagnat_scenario(&skewed, &basis, &a, &a, &schmidt_diagonal_coeffs(&a), &TOL),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    fn model(gammas: &[f64], etas: Vec<Ket>) -> PreparationModel {
        let alphas = standard_basis(2);
        PreparationModel::new(gammas.iter().zip(alphas).zip(etas).map(|((g, a), e)| (r(*g), a, e)).collect()).unwrap()
    }

    #[test]
    fn collinear_environment_gives_pure_system() {
        let e0 = Ket::basis(2, 0);
        let report = prepare_with_environment(&model(&[H, H], vec![e0.clone(), e0]), &TOL).unwrap();
        assert_eq!(report.verdict, Verdict::Pure);
        assert!(report.density("system").unwrap().distance(&projector(&plus())) < 1e-15);
    }

    #[test]
    fn orthogonal_environment_gives_improper_mixture() {
        let report = prepare_with_environment(&model(&[H, H], standard_basis(2)), &TOL).unwrap();
        assert_eq!(report.verdict, Verdict::ImproperMixture);
        assert!(report.density("system").unwrap().matrix().distance(&Matrix::diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn partially_overlapping_environment() {
        let etas = vec![Ket::basis(2, 0), plus()];
        let report = prepare_with_environment(&model(&[0.6f64.sqrt(), 0.4f64.sqrt()], etas), &TOL).unwrap();
        assert_eq!(report.verdict, Verdict::ImproperMixture);
        let rho = report.density("system").unwrap().matrix();
        // alphas are orthogonal so the joint ket is already normalized;
        // rho_01 = sqrt(.6 * .4) <+|0> = sqrt(.24)/sqrt2, purity .36 + .16 + 2 * .12
        assert!((rho.get(0, 1).re - 0.24f64.sqrt() * H).abs() < 1e-15);
        let p = report.get_finding("purity").unwrap();
        assert!((p - 0.76).abs() < 1e-14);
        assert!(p > 0.52 && p < 1.0);
    }

    #[test]
    fn preparation_validation() {
        let bad = PreparationModel::new(vec![(r(0.5), Ket::basis(2, 0), Ket::basis(2, 0))]);
        assert!(matches!(bad, Err(Error::NotNormalized { .. })));
        let cancelling = PreparationModel::new(vec![
            (r(H), Ket::basis(2, 0), Ket::basis(2, 0)),
            (r(-H), Ket::basis(2, 0), Ket::basis(2, 0)),
        ])
        .unwrap();
        assert!(matches!(prepare_with_environment(&cancelling, &TOL), Err(Error::ZeroVector { .. })));
    }

    #[test]
    fn premeasurement_examples() {
        let pointers = standard_basis(2);
        let report = premeasurement(&[r(1.0), r(0.0)], &pointers, &TOL).unwrap();
        assert_eq!(report.verdict, Verdict::Pure);
        assert_eq!(report.density("system").unwrap().matrix(), &Matrix::diag(&[1.0, 0.0]));

        let report = premeasurement(&[r(H), r(H)], &pointers, &TOL).unwrap();
        assert_eq!(report.verdict, Verdict::ImproperMixture);
        assert!(report.density("system").unwrap().matrix().distance(&Matrix::diag(&[0.5, 0.5])) < 1e-15);

        let report = premeasurement(&[r(0.6f64.sqrt()), r(0.4f64.sqrt())], &pointers, &TOL).unwrap();
        assert!(report.density("system").unwrap().matrix().distance(&Matrix::diag(&[0.6, 0.4])) < 1e-15);
        assert!(report.get_finding("distinguishable_gap").unwrap() < 1e-15);

        assert!(matches!(premeasurement(&[r(1.0)], &pointers, &TOL), Err(Error::DimensionMismatch(_))));
    }
}
