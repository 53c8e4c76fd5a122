use std::path::PathBuf;
use std::process::Command;

use mixtura::random;
use mixtura::{DensityOperator, Ensemble, Tolerance};
use mixtura_cli::statefile::{parse_state_file, StateFile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_with_env(args: &[&str], env_tol: Option<&str>) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("mixtura").chain(args.iter().copied());
    let code = mixtura_cli::run(argv, env_tol, &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn run(args: &[&str]) -> Outcome {
    run_with_env(args, None)
}

/// Value of `key=` in machine output.
fn field<'a>(stdout: &'a str, key: &str) -> &'a str {
    let prefix = format!("{key}=");
    stdout.lines().find_map(|l| l.strip_prefix(prefix.as_str())).unwrap_or_else(|| panic!("no `{key}` in\n{stdout}"))
}

fn reals(s: &str) -> Vec<f64> {
    s.split(',').map(|x| x.parse().unwrap()).collect()
}

#[test]
fn ptrace_of_bell_is_half_identity() {
    let o = run(&["ptrace", "--file", &fixture("bell.state"), "--dims", "2x2", "--keep", "A"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("+0.500000+0.000000i  +0.000000+0.000000i"));
    let o = run(&["ptrace", "--file", &fixture("bell.state"), "--keep", "B", "--format", "machine"]);
    let data = reals(field(&o.stdout, "reduced.data"));
    let expected = [0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0];
    assert!(data.iter().zip(expected).all(|(x, y)| (x - y).abs() < 1e-15));
}

#[test]
fn ghjw_on_bell_gives_the_hadamard_basis() {
    let o = run(&[
        "ghjw",
        "--file",
        &fixture("bell.state"),
        "--dims",
        "2x2",
        "--ensemble",
        &fixture("pm.ens"),
        "--format",
        "machine",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c0 = reals(field(&o.stdout, "ancilla_basis.0.data"));
    let c1 = reals(field(&o.stdout, "ancilla_basis.1.data"));
    // up to a global phase, which the phase convention fixes to +1 here
    for (got, want) in [(c0, [h, 0.0, h, 0.0]), (c1, [h, 0.0, -h, 0.0])] {
        assert!(got.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-12), "{got:?}");
    }
    let residual: f64 = field(&o.stdout, "reconstruction_error").parse().unwrap();
    assert!(residual <= 1e-10);
}

#[test]
fn degenerate_despagnat_weights_are_rejected() {
    let o = run(&["scenario", "despagnat", "--a", "0.5,0.5", "--b", "0.5,0.5"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.is_empty());
    assert_eq!(o.stderr.lines().count(), 1);
    assert!(o.stderr.starts_with("error: DegenerateWeights:"), "{}", o.stderr);
}

#[test]
fn despagnat_findings_appear_once() {
    let o = run(&["scenario", "despagnat", "--a", "0.6,0.4", "--b", "0.6,0.4", "--format", "machine"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    for label in ["purity_naive", "purity_pure", "marginal_gap_a", "marginal_gap_b"] {
        let key = format!("finding.{label}=");
        assert_eq!(o.stdout.lines().filter(|l| l.starts_with(&key)).count(), 1, "{label}");
    }
    let naive: f64 = field(&o.stdout, "finding.purity_naive").parse().unwrap();
    assert!((naive - 0.2704).abs() < 1e-12);
    assert_eq!(field(&o.stdout, "verdict"), "PureCompositeContradictsMixedClaim");
    assert!(o.stdout.lines().all(|l| l.contains('=')));
}

#[test]
fn unequal_spectra_are_a_domain_error() {
    let o = run(&["scenario", "despagnat", "--a", "0.7,0.3", "--b", "0.6,0.4"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.starts_with("error: MarginalMismatch:"), "{}", o.stderr);
}

#[test]
fn preparation_verdicts() {
    let verdict = |file: &str| {
        let o = run(&["scenario", "preparation", "--file", &fixture(file), "--format", "machine"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        field(&o.stdout, "verdict").to_string()
    };
    assert_eq!(verdict("entangled.prep"), "ImproperMixture");
    assert_eq!(verdict("collinear.prep"), "Pure");
}

#[test]
fn premeasure_matches_the_projector_mixture() {
    let o = run(&[
        "scenario",
        "premeasure",
        "--amps",
        "0.6,-0.8",
        "--random-pointers",
        "--pointer-dim",
        "4",
        "--format",
        "machine",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let gap: f64 = field(&o.stdout, "finding.distinguishable_gap").parse().unwrap();
    assert!(gap <= 1e-12);
}

#[test]
fn ancilla_too_small_for_the_trine() {
    let o = run(&["ghjw", "--file", &fixture("bell.state"), "--ensemble", &fixture("trine.ens")]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.starts_with("error: AncillaTooSmall:"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(run(&[]).code, 2);
    assert_eq!(run(&["ptrace", "--file", &fixture("bell.state")]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["ptrace", "--file", "/nonexistent/x.state", "--keep", "A"]).code, 2);
    assert_eq!(run(&["ptrace", "--file", &fixture("bell.state"), "--dims", "2by2", "--keep", "A"]).code, 2);
    assert_eq!(run(&["mix", "--file", &fixture("bell.state")]).code, 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.state");
    std::fs::write(&bad, "kind: ket\ndims: [2]\ndata: [1, 0, zero, 0]\n").unwrap();
    let o = run(&["purity", "--file", bad.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("SyntaxError") && o.stderr.contains("line 3, column 14"), "{}", o.stderr);

    let unnormalized = dir.path().join("long.state");
    std::fs::write(&unnormalized, "kind: ket\ndims: [2]\ndata: [1, 0, 1, 0]\n").unwrap();
    let o = run(&["purity", "--file", unnormalized.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.starts_with("error: InvariantViolation:"), "{}", o.stderr);
}

#[test]
fn help_and_version_exit_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("selftest"));
    assert_eq!(run(&["--version"]).code, 0);
}

#[test]
fn tolerance_flag_beats_environment() {
    let args = ["purity", "--file", &fixture("half.state")];
    assert_eq!(run_with_env(&args, Some("not-a-number")).code, 2);
    assert_eq!(run_with_env(&args, Some("-1")).code, 2);
    let mut with_flag = args.to_vec();
    with_flag.extend(["--tol", "1e-9"]);
    assert_eq!(run_with_env(&with_flag, Some("not-a-number")).code, 0);
}

#[test]
fn loose_tolerance_changes_the_purity_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("almost.state");
    std::fs::write(&path, "kind: density\ndims: [2]\ndata: [0.999999,0, 0,0, 0,0, 0.000001,0]\n").unwrap();
    let p = path.to_str().unwrap();
    let strict = run(&["purity", "--file", p, "--format", "machine"]);
    assert_eq!(field(&strict.stdout, "is_pure"), "false");
    let loose = run_with_env(&["purity", "--file", p, "--format", "machine"], Some("1e-3"));
    assert_eq!(field(&loose.stdout, "is_pure"), "true");
}

#[test]
fn binary_runs() {
    let exe = env!("CARGO_BIN_EXE_mixtura");
    let out = Command::new(exe).args(["mix", "--file", &fixture("zplus.ens"), "--format", "machine"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let rho = reals(field(&stdout, "rho.data"));
    let expected = [0.75, 0.0, 0.25, 0.0, 0.25, 0.0, 0.25, 0.0];
    assert!(rho.iter().zip(expected).all(|(x, y)| (x - y).abs() < 1e-15), "{rho:?}");

    let rejected =
        Command::new(exe).args(["scenario", "despagnat", "--a", "0.5,0.5", "--b", "0.5,0.5"]).output().unwrap();
    assert_eq!(rejected.status.code(), Some(1));
    assert!(String::from_utf8(rejected.stderr).unwrap().starts_with("error: DegenerateWeights:"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_files_round_trip(seed in any::<u64>(), dim in 1usize..=5, members in 1usize..=4) {
        let tol = Tolerance::DEFAULT;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ket = random::ket(&mut rng, dim);
        let rank = 1 + (seed as usize) % dim;
        let rho: DensityOperator = random::density(&mut rng, dim, rank);
        let weights = random::weights(&mut rng, members);
        let kets = (0..members).map(|_| random::ket(&mut rng, dim.max(2)));
        let files = [
            StateFile::from_ket(&ket, &[dim]),
            StateFile::from_density(&rho, &[dim]),
            match Ensemble::new(weights.into_iter().zip(kets).collect()) {
                Ok(e) => StateFile::from_ensemble(&e),
                Err(_) => StateFile::from_ket(&ket, &[dim]),
            },
        ];
        for f in files {
            let text = f.serialize();
            let parsed = parse_state_file(&text, &tol).unwrap();
            prop_assert_eq!(&parsed, &f);
            prop_assert_eq!(parsed.serialize(), text);
        }
    }
}

#[test]
fn slightly_off_trace_is_rescaled_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("drift.state");
    std::fs::write(&path, "kind: density\ndims: [2]\ndata: [0.500000001,0, 0,0, 0,0, 0.5,0]\n").unwrap();
    let o = run(&["purity", "--file", path.to_str().unwrap()]);
    assert_eq!(o.code, 0);
    assert!(o.stderr.starts_with("warning:"), "{}", o.stderr);
    std::fs::write(&path, "kind: density\ndims: [2]\ndata: [0.6,0, 0,0, 0,0, 0.5,0]\n").unwrap();
    let o = run(&["purity", "--file", path.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.starts_with("error: InvariantViolation:"), "{}", o.stderr);
}
