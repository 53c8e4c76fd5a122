//! Randomized verification suites.
//!
//! Each suite draws its inputs from a ChaCha stream seeded with
//! `seed + suite id`, runs the library operation, and measures the worst
//! residual against an independent route (a brute-force index contraction,
//! a second decomposition, or a closed-form value). The outcome records the
//! worst value seen next to the bound it must respect, so the same results
//! serve the acceptance tests and the `selftest` CLI subcommand.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decompositions::{
    apply_local, contract_ancilla, ghjw_steer, lemma_unitary, purify, purify_with_ancilla, schmidt,
    DEFAULT_SCHMIDT_CUTOFF,
};
use crate::error::Error;
use crate::numerics::{eig_hermitian, Matrix, Tolerance, C64, ZERO};
use crate::random;
use crate::scenarios::{
    despagnat_scenario, orthonormality_residual, premeasurement, prepare_with_environment, schmidt_diagonal_coeffs,
    standard_basis, PreparationModel, Verdict,
};
use crate::states::{
    convex_mix, partial_trace, projector, reduced_state, BipartiteDims, DensityOperator, Ensemble, Ket, Subsystem,
};

const TOL: Tolerance = Tolerance::DEFAULT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// Worst observed value of one measured quantity and the bound it must meet.
#[derive(Debug, Clone)]
pub struct Metric {
    pub label: &'static str,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl Metric {
    fn at_most(label: &'static str, limit: f64) -> Self {
        Self { label, value: 0.0, limit, bound: Bound::AtMost }
    }

    fn at_least(label: &'static str, limit: f64) -> Self {
        Self { label, value: f64::INFINITY, limit, bound: Bound::AtLeast }
    }

    fn observe(&mut self, x: f64) {
        let x = if x.is_nan() { f64::INFINITY } else { x };
        self.value = match self.bound {
            Bound::AtMost => self.value.max(x),
            Bound::AtLeast => self.value.min(if x.is_infinite() { f64::NEG_INFINITY } else { x }),
        };
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.limit,
            Bound::AtLeast => self.value >= self.limit,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub cases: usize,
    pub metrics: Vec<Metric>,
    /// Cases that produced an unexpected error or verdict.
    pub failures: Vec<String>,
}

impl CriterionOutcome {
    fn new(id: u8, name: &'static str, metrics: Vec<Metric>) -> Self {
        Self { id, name, cases: 0, metrics, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.metrics.iter().all(Metric::passed)
    }

    fn metric(&mut self, label: &str) -> &mut Metric {
        self.metrics.iter_mut().find(|m| m.label == label).unwrap_or_else(|| panic!("unknown metric {label}"))
    }

    fn observe(&mut self, label: &str, x: f64) {
        self.metric(label).observe(x);
    }

    fn fail(&mut self, message: String) {
        // keep the report short; the count is what matters past a few
        if self.failures.len() < 5 {
            self.failures.push(message);
        } else if self.failures.len() == 5 {
            self.failures.push("...".into());
        }
    }
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {} ({} cases)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.cases
        )?;
        for m in &self.metrics {
            let op = match m.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            write!(f, "; {} {:.3e} {op} {:e}", m.label, m.value, m.limit)?;
        }
        for failure in &self.failures {
            write!(f, "; {failure}")?;
        }
        Ok(())
    }
}

fn rng_for(seed: u64, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64))
}

fn random_dims(rng: &mut ChaCha8Rng) -> BipartiteDims {
    BipartiteDims { a: rng.random_range(2..=4), b: rng.random_range(2..=5) }
}

/// Runs suites 1 through 8.
pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    vec![
        partial_trace_oracle(seed),
        schmidt_suite(seed),
        purification_suite(seed),
        lemma_suite(seed),
        steering_suite(seed),
        reconstruction_demo(),
        preparation_suite(seed),
        premeasurement_suite(seed),
    ]
}

/// `rho_A[i][j] = sum_k <i k| rho |j k>` evaluated with explicit basis bras
/// and kets, independent of the library's index arithmetic.
pub fn brute_force_partial_trace(rho: &Matrix, dims: BipartiteDims, keep: Subsystem) -> Matrix {
    let basis = |dim: usize, i: usize| Ket::basis(dim, i).to_column();
    let (kept, traced) = match keep {
        Subsystem::A => (dims.a, dims.b),
        Subsystem::B => (dims.b, dims.a),
    };
    Matrix::from_fn(kept, kept, |i, j| {
        let mut sum = ZERO;
        for k in 0..traced {
            let (bra, ket) = match keep {
                Subsystem::A => {
                    (basis(dims.a, i).tensor(&basis(dims.b, k)), basis(dims.a, j).tensor(&basis(dims.b, k)))
                }
                Subsystem::B => {
                    (basis(dims.a, k).tensor(&basis(dims.b, i)), basis(dims.a, k).tensor(&basis(dims.b, j)))
                }
            };
            sum += (&(&bra.dagger() * rho) * &ket).get(0, 0);
        }
        sum
    })
}

pub fn partial_trace_oracle(seed: u64) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(
        1,
        "partial trace vs index-summation oracle",
        vec![Metric::at_most("max_entry_error", 1e-12)],
    );
    let mut rng = rng_for(seed, 1);
    for _ in 0..500 {
        let dims = random_dims(&mut rng);
        let rank = rng.random_range(1..=dims.total());
        let rho = random::density(&mut rng, dims.total(), rank);
        for keep in [Subsystem::A, Subsystem::B] {
            match partial_trace(&rho, dims, keep) {
                Ok(reduced) => {
                    let oracle = brute_force_partial_trace(rho.matrix(), dims, keep);
                    out.observe("max_entry_error", (reduced.matrix() - &oracle).max_abs());
                }
                Err(e) => out.fail(format!("partial_trace on {dims}: {e}")),
            }
        }
        out.cases += 1;
    }
    out
}

pub fn schmidt_suite(seed: u64) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(
        2,
        "Schmidt reconstruction and spectrum",
        vec![Metric::at_most("reconstruction_residual", 1e-10), Metric::at_most("coefficient_spectrum_gap", 1e-10)],
    );
    let mut rng = rng_for(seed, 2);
    for _ in 0..500 {
        let dims = random_dims(&mut rng);
        let rank = rng.random_range(1..=dims.a.min(dims.b));
        let psi = random::bipartite_ket(&mut rng, dims, rank);
        let decomposition = match schmidt(&psi, dims, DEFAULT_SCHMIDT_CUTOFF) {
            Ok(d) => d,
            Err(e) => {
                out.fail(format!("schmidt on {dims}: {e}"));
                continue;
            }
        };
        out.observe("reconstruction_residual", decomposition.reconstruction_error(&psi));
        let marginal = partial_trace(&projector(&psi), dims, Subsystem::A).expect("dims checked");
        let spectrum = eig_hermitian(marginal.matrix(), &TOL).expect("marginal is Hermitian");
        let gap = spectrum
            .values
            .iter()
            .enumerate()
            .map(|(s, w)| (w - decomposition.coeffs.get(s).map_or(0.0, |c| c * c)).abs())
            .fold(0.0, f64::max);
        out.observe("coefficient_spectrum_gap", gap);
        if decomposition.rank() != rank {
            out.fail(format!("expected Schmidt rank {rank}, got {}", decomposition.rank()));
        }
        out.cases += 1;
    }
    out
}

pub fn purification_suite(seed: u64) -> CriterionOutcome {
    let mut out =
        CriterionOutcome::new(3, "purification reduces back to rho", vec![Metric::at_most("marginal_error", 1e-10)]);
    let mut rng = rng_for(seed, 3);
    for _ in 0..500 {
        let dim = rng.random_range(2..=6);
        let rank = rng.random_range(1..=dim);
        let rho = random::density(&mut rng, dim, rank);
        let p = purify(&rho, &TOL);
        let back = partial_trace(&projector(&p.state), p.dims, Subsystem::A).expect("purification dims");
        out.observe("marginal_error", back.distance(&rho));
        if p.dims.b != rank {
            out.fail(format!("rank {rank} state purified with ancilla {}", p.dims.b));
        }
        out.cases += 1;
    }
    out
}

pub fn lemma_suite(seed: u64) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(
        4,
        "unitary relating equal-marginal purifications",
        vec![Metric::at_most("unitarity_residual", 1e-10), Metric::at_most("mapping_residual", 1e-9)],
    );
    let mut rng = rng_for(seed, 4);
    for _ in 0..200 {
        let dims = random_dims(&mut rng);
        let rank = rng.random_range(1..=dims.a.min(dims.b));
        let psi = random::bipartite_ket(&mut rng, dims, rank);
        let v = random::unitary(&mut rng, dims.b);
        let phi = Ket::normalized(apply_local(&v, psi.amps(), dims, Subsystem::B).expect("dims"))
            .expect("unitaries keep the norm");
        match lemma_unitary(&psi, &phi, dims, &TOL) {
            Ok(u) => {
                out.observe("unitarity_residual", (&u.dagger() * &u).distance(&Matrix::identity(dims.b)));
                let mapped =
                    Ket::normalized(apply_local(&u, phi.amps(), dims, Subsystem::B).expect("dims")).expect("non-zero");
                out.observe("mapping_residual", mapped.distance_up_to_phase(&psi));
            }
            Err(e) => out.fail(format!("equal marginals on {dims}: {e}")),
        }

        // a unitary on A changes the marginal generically
        let w = random::unitary(&mut rng, dims.a);
        let other = Ket::normalized(apply_local(&w, psi.amps(), dims, Subsystem::A).expect("dims")).expect("non-zero");
        let gap = reduced_state(&psi, dims, Subsystem::A)
            .expect("dims")
            .distance(&reduced_state(&other, dims, Subsystem::A).expect("dims"));
        if gap > 1e-6 {
            match lemma_unitary(&psi, &other, dims, &TOL) {
                Err(Error::MarginalsDiffer { .. }) => {}
                Err(e) => out.fail(format!("mismatched marginals raised {}", e.name())),
                Ok(_) => out.fail(format!("mismatched marginals (gap {gap:e}) accepted")),
            }
        }
        out.cases += 1;
    }
    out
}

/// A random decomposition of `rho` with `members` kets: rows of a random
/// unitary mix the weighted eigenvectors, `x_i = sum_j W_ij sqrt(l_j) p_j`.
pub fn random_decomposition(rng: &mut ChaCha8Rng, rho: &DensityOperator, members: usize) -> Ensemble {
    let spectrum = rho.spectrum(&TOL);
    let dim = rho.dim();
    let rank = spectrum.values.iter().filter(|&&w| w > TOL.abs).count();
    assert!(members >= rank, "need at least rank({rank}) members");
    assert!(rank > 1 || members == 1, "a pure state has only one-member decompositions");
    loop {
        let w = random::unitary(rng, members);
        let entries: Vec<(f64, Ket)> = (0..members)
            .filter_map(|i| {
                let mut x = vec![ZERO; dim];
                for j in 0..rank {
                    let c = w.get(i, j) * spectrum.values[j].sqrt();
                    for (slot, p) in x.iter_mut().zip(spectrum.vector(j)) {
                        *slot += c * p;
                    }
                }
                let f: f64 = x.iter().map(|z| z.norm_sqr()).sum();
                Ket::normalized(x).ok().map(|k| (f, k))
            })
            .collect();
        if entries.len() != members {
            continue;
        }
        if let Ok(e) = Ensemble::new(entries) {
            return e;
        }
    }
}

pub fn steering_suite(seed: u64) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(
        5,
        "ensemble steering of a purification",
        vec![
            Metric::at_most("reconstruction_residual", 1e-9),
            Metric::at_most("weight_recovery_error", 1e-9),
            Metric::at_most("ancilla_orthonormality", 1e-10),
        ],
    );
    let mut rng = rng_for(seed, 5);
    for _ in 0..200 {
        let dim = rng.random_range(2..=5);
        let rank = rng.random_range(1..=dim);
        let rho = random::density(&mut rng, dim, rank);
        // a pure state has no decomposition with two distinct kets
        let members = if rank == 1 { 1 } else { rank + rng.random_range(0..=2) };
        let target = random_decomposition(&mut rng, &rho, members);
        let purification = purify_with_ancilla(&rho, members, &TOL).expect("members >= rank");
        let (psi, dims) = (&purification.state, purification.dims);

        match ghjw_steer(psi, dims, &target, &TOL) {
            Ok(r) => {
                out.observe("reconstruction_residual", r.reconstruction_error);
                out.observe("ancilla_orthonormality", orthonormality_residual(&r.ancilla_basis));
                for (c, f) in r.ancilla_basis.iter().zip(target.weights()) {
                    let v = contract_ancilla(psi.amps(), dims, c.amps());
                    let weight: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                    out.observe("weight_recovery_error", (weight - f).abs());
                }
            }
            Err(e) => out.fail(format!("valid decomposition rejected: {e}")),
        }

        // same kets with other weights mix to a different state
        let shuffled = random::weights(&mut rng, members);
        let wrong = Ensemble::new(shuffled.into_iter().zip(target.kets().iter().cloned()).collect())
            .expect("kets already distinct");
        if convex_mix(&wrong).distance(&rho) > 1e-6 {
            match ghjw_steer(psi, dims, &wrong, &TOL) {
                Err(Error::NotADecomposition { .. }) => {}
                other => out.fail(format!("invalid decomposition gave {:?}", other.map(|_| ()).map_err(|e| e.name()))),
            }
        }

        // one member too many for the minimal ancilla
        if rank > 1 {
            let minimal = purify(&rho, &TOL);
            let crowded = random_decomposition(&mut rng, &rho, minimal.dims.b + 1);
            match ghjw_steer(&minimal.state, minimal.dims, &crowded, &TOL) {
                Err(Error::AncillaTooSmall { .. }) => {}
                other => out.fail(format!("m > dim B gave {:?}", other.map(|_| ()).map_err(|e| e.name()))),
            }
        }
        out.cases += 1;
    }
    out
}

pub fn reconstruction_demo() -> CriterionOutcome {
    let mut out = CriterionOutcome::new(
        6,
        "four-state reconstruction, a = b = (0.6, 0.4)",
        vec![
            Metric::at_most("naive_purity_error", 1e-12),
            Metric::at_most("pure_purity_error", 1e-12),
            Metric::at_most("marginal_gap", 1e-10),
        ],
    );
    let a = [0.6, 0.4];
    // sum_jk (a_j b_k)^2 = .1296 + .0576 + .0576 + .0256
    let expected_naive = 0.2704;
    let mut rng = rng_for(0, 6);
    let standard = standard_basis(2);
    let rotated_u: Vec<Ket> = {
        let u = random::unitary(&mut rng, 2);
        (0..2).map(|j| Ket::new(u.col(j)).expect("unitary column")).collect()
    };
    let rotated_v: Vec<Ket> = {
        let v = random::unitary(&mut rng, 2);
        (0..2).map(|j| Ket::new(v.col(j)).expect("unitary column")).collect()
    };
    for (u, v) in [(&standard, &standard), (&rotated_u, &rotated_v)] {
        match despagnat_scenario(u, v, &a, &a, &schmidt_diagonal_coeffs(&a), &TOL) {
            Ok(report) => {
                let f = |label| report.get_finding(label).expect("finding present");
                out.observe("naive_purity_error", (f("purity_naive") - expected_naive).abs());
                out.observe("pure_purity_error", (f("purity_pure") - 1.0).abs());
                out.observe("marginal_gap", f("marginal_gap_a").max(f("marginal_gap_b")));
                if report.verdict != Verdict::PureCompositeContradictsMixedClaim {
                    out.fail(format!("verdict {}", report.verdict));
                }
            }
            Err(e) => out.fail(format!("scenario failed: {e}")),
        }
        out.cases += 1;
    }
    out
}

fn random_gammas(rng: &mut ChaCha8Rng, m: usize) -> Vec<C64> {
    let k = random::ket(rng, m);
    k.into_amps()
}

/// Kets with every pairwise overlap `|<x_i|x_j>| <= max_overlap`.
fn spread_kets(rng: &mut ChaCha8Rng, dim: usize, count: usize, max_overlap: f64) -> Vec<Ket> {
    loop {
        let kets: Vec<Ket> = (0..count).map(|_| random::ket(rng, dim)).collect();
        let spread = (0..count).all(|i| (i + 1..count).all(|j| kets[i].inner(&kets[j]).norm() <= max_overlap));
        if spread {
            return kets;
        }
    }
}

pub fn preparation_suite(seed: u64) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(
        7,
        "preparation with an environment",
        vec![Metric::at_least("collinear_min_purity", 1.0 - 1e-9), Metric::at_most("spread_max_purity", 1.0 - 1e-6)],
    );
    let mut rng = rng_for(seed, 7);
    for _ in 0..200 {
        let (ds, de, m) = (rng.random_range(2..=5), rng.random_range(2..=5), rng.random_range(2..=5));
        let gammas = random_gammas(&mut rng, m);
        let alphas: Vec<Ket> = (0..m).map(|_| random::ket(&mut rng, ds)).collect();

        let eta = random::ket(&mut rng, de);
        let collinear: Vec<Ket> = (0..m)
            .map(|_| {
                let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
                Ket::new(eta.amps().iter().map(|z| z * phase).collect()).expect("unit phase")
            })
            .collect();
        let model = PreparationModel::new(
            gammas.iter().copied().zip(alphas.iter().cloned()).zip(collinear).map(|((g, a), e)| (g, a, e)).collect(),
        )
        .expect("valid model");
        match prepare_with_environment(&model, &TOL) {
            Ok(report) => {
                out.observe("collinear_min_purity", report.get_finding("purity").expect("purity"));
                if report.verdict != Verdict::Pure {
                    out.fail(format!("collinear environment gave {}", report.verdict));
                }
            }
            Err(e) => out.fail(format!("collinear model: {e}")),
        }

        let alphas = spread_kets(&mut rng, ds, m, 0.99);
        let etas = spread_kets(&mut rng, de, m, 0.99);
        let model =
            PreparationModel::new(gammas.iter().copied().zip(alphas).zip(etas).map(|((g, a), e)| (g, a, e)).collect())
                .expect("valid model");
        match prepare_with_environment(&model, &TOL) {
            Ok(report) => {
                out.observe("spread_max_purity", report.get_finding("purity").expect("purity"));
                if report.verdict != Verdict::ImproperMixture {
                    out.fail(format!("spread environment gave {}", report.verdict));
                }
            }
            Err(e) => out.fail(format!("spread model: {e}")),
        }
        out.cases += 1;
    }
    out
}

pub fn premeasurement_suite(seed: u64) -> CriterionOutcome {
    let mut out = CriterionOutcome::new(
        8,
        "premeasurement leaves the projector mixture",
        vec![Metric::at_most("distinguishable_gap", 1e-12), Metric::at_most("max_off_diagonal", 1e-12)],
    );
    let mut rng = rng_for(seed, 8);
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let pointer_dim = n + rng.random_range(0..=2);
        let amps = random::ket(&mut rng, n).into_amps();
        let u = random::unitary(&mut rng, pointer_dim);
        let pointers: Vec<Ket> = (0..n).map(|j| Ket::new(u.col(j)).expect("unitary column")).collect();
        match premeasurement(&amps, &pointers, &TOL) {
            Ok(report) => {
                out.observe("distinguishable_gap", report.get_finding("distinguishable_gap").expect("gap"));
                out.observe("max_off_diagonal", report.get_finding("max_off_diagonal").expect("off"));
            }
            Err(e) => out.fail(format!("premeasurement: {e}")),
        }
        out.cases += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_oracle_on_bell() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Ket::from_real(&[h, 0., 0., h]).unwrap();
        let dims = BipartiteDims::new(2, 2).unwrap();
        let reduced = brute_force_partial_trace(projector(&bell).matrix(), dims, Subsystem::B);
        assert!(reduced.distance(&Matrix::diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn metric_bounds() {
        let mut m = Metric::at_most("x", 1.0);
        m.observe(0.5);
        assert!(m.passed());
        m.observe(f64::NAN);
        assert!(!m.passed());
        let mut m = Metric::at_least("y", 0.5);
        m.observe(0.7);
        assert!(m.passed());
        m.observe(0.2);
        assert!(!m.passed());
    }
}
