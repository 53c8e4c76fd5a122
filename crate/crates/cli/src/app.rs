use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use mixtura::decompositions::{
    contract_ancilla, ghjw_steer, lemma_unitary, purify, purify_with_ancilla, schmidt, DEFAULT_SCHMIDT_CUTOFF,
};
use mixtura::scenarios::{
    despagnat_scenario, premeasurement, prepare_with_environment, schmidt_diagonal_coeffs, standard_basis,
};
use mixtura::states::{convex_mix, is_pure, partial_trace, projector, purity};
use mixtura::{random, selftest, BipartiteDims, DensityOperator, Ensemble, Ket, Matrix, Subsystem, Tolerance, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::render::{Format, Report};
use crate::statefile::{FileValue, StateFile, StateFileError};

pub const TOL_ENV: &str = "MIXTURA_TOL";

#[derive(Debug, Parser)]
#[command(name = "mixtura", version, about = "Density operators, purifications and ensemble steering")]
struct Cli {
    /// Absolute and relative tolerance (overrides MIXTURA_TOL)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Schmidt coefficients at or below this are dropped
    #[arg(long, global = true)]
    cutoff: Option<f64>,
    /// Seed for randomized demos and the self-test suites
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Keep {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduced state of one factor
    Ptrace {
        #[arg(long)]
        file: PathBuf,
        /// Factor dimensions as AxB (defaults to the file's dims)
        #[arg(long, value_parser = parse_dims)]
        dims: Option<BipartiteDims>,
        #[arg(long, value_enum)]
        keep: Keep,
    },
    /// Tr(rho^2) and the purity test
    Purity {
        #[arg(long)]
        file: PathBuf,
    },
    /// Schmidt form of a bipartite ket
    Schmidt {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_parser = parse_dims)]
        dims: Option<BipartiteDims>,
    },
    /// Pure joint state reducing to the given state
    Purify {
        #[arg(long)]
        file: PathBuf,
        /// Ancilla dimension (defaults to the rank)
        #[arg(long)]
        ancilla: Option<usize>,
    },
    /// Ancilla basis steering a purification into an ensemble
    Ghjw {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_parser = parse_dims)]
        dims: Option<BipartiteDims>,
        #[arg(long)]
        ensemble: PathBuf,
    },
    /// Ancilla unitary relating two purifications with equal marginals
    LemmaUnitary {
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, value_parser = parse_dims)]
        dims: Option<BipartiteDims>,
    },
    /// Density operator of an ensemble
    Mix {
        #[arg(long)]
        file: PathBuf,
    },
    #[command(subcommand)]
    Scenario(Scenario),
    /// Run the randomized verification suites
    Selftest,
}

#[derive(Debug, Subcommand)]
enum Scenario {
    /// Naive four-state mixture against the pure composite
    Despagnat {
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<f64>,
        /// Draw both bases at random from the seed
        #[arg(long)]
        random_bases: bool,
    },
    /// System prepared together with an environment
    Preparation {
        #[arg(long)]
        file: PathBuf,
    },
    /// System coupled to orthonormal pointer states
    Premeasure {
        /// Real amplitudes, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "file")]
        amps: Option<Vec<f64>>,
        /// Ket file with the amplitudes
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        pointer_dim: Option<usize>,
        /// Random orthonormal pointers drawn from the seed
        #[arg(long)]
        random_pointers: bool,
    },
}

fn parse_dims(s: &str) -> Result<BipartiteDims, String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected AxB, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a dimension"));
    BipartiteDims::new(parse(a)?, parse(b)?).map_err(|e| e.to_string())
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    File { path: PathBuf, source: StateFileError },
    #[error(transparent)]
    Domain(#[from] mixtura::Error),
    #[error("{0} of 8 suites failed")]
    SelftestFailed(usize),
}

impl CliError {
    fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Read { .. } => "ReadError",
            CliError::File { source, .. } => source.name(),
            CliError::Domain(e) => e.name(),
            CliError::SelftestFailed(_) => "SelftestFailed",
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } => 2,
            CliError::File { source: StateFileError::Syntax { .. }, .. } => 2,
            CliError::File { .. } | CliError::Domain(_) | CliError::SelftestFailed(_) => 1,
        }
    }
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub tolerance: Tolerance,
    pub cutoff: f64,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    fn resolve(cli: &Cli, env_tol: Option<&str>) -> Result<Self, CliError> {
        let tol_value = match (cli.tol, env_tol) {
            (Some(t), _) => Some(t),
            (None, Some(s)) => {
                Some(s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{TOL_ENV}=`{s}` is not a number")))?)
            }
            (None, None) => None,
        };
        let tolerance = match tol_value {
            Some(t) => Tolerance::uniform(t).map_err(|e| CliError::Usage(e.to_string()))?,
            None => Tolerance::DEFAULT,
        };
        let cutoff = cli.cutoff.unwrap_or(DEFAULT_SCHMIDT_CUTOFF);
        if !(cutoff.is_finite() && cutoff >= 0.0) {
            return Err(CliError::Usage(format!("cutoff must be finite and non-negative, got {cutoff}")));
        }
        Ok(Self { tolerance, cutoff, format: cli.format, seed: cli.seed })
    }
}

/// Runs one command line. Returns the process exit code: 0 on success, 1 on
/// domain errors, 2 on usage or parse errors.
pub fn run<I, S>(args: I, env_tol: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let sink: &mut dyn Write = if informational { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if informational { 0 } else { 2 };
        }
    };
    let result = RunConfig::resolve(&cli, env_tol).and_then(|config| dispatch(&cli.command, &config, out, err));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            e.exit_code()
        }
    }
}

fn load(path: &Path, tol: &Tolerance) -> Result<(StateFile, FileValue), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    let wrap = |source| CliError::File { path: path.into(), source };
    let file = StateFile::parse(&text).map_err(wrap)?;
    let value = file.value(tol).map_err(wrap)?;
    Ok((file, value))
}

fn wrong_kind(path: &Path, file: &StateFile, wanted: &str) -> CliError {
    CliError::Usage(format!("{}: expected {wanted}, found a {} file", path.display(), file.kind))
}

fn load_ket(path: &Path, tol: &Tolerance) -> Result<(StateFile, Ket), CliError> {
    match load(path, tol)? {
        (f, FileValue::Ket(k)) => Ok((f, k)),
        (f, _) => Err(wrong_kind(path, &f, "a ket")),
    }
}

fn load_ensemble(path: &Path, tol: &Tolerance) -> Result<Ensemble, CliError> {
    match load(path, tol)? {
        (_, FileValue::Ensemble(e)) => Ok(e),
        (f, _) => Err(wrong_kind(path, &f, "an ensemble")),
    }
}

/// Kets become projectors and ensembles their mixture.
fn load_density(path: &Path, tol: &Tolerance, err: &mut dyn Write) -> Result<(StateFile, DensityOperator), CliError> {
    match load(path, tol)? {
        (f, FileValue::Ket(k)) => Ok((f, projector(&k))),
        (f, FileValue::Density(d)) => {
            if d.was_renormalized() {
                let _ = writeln!(err, "warning: {}: trace rescaled to 1", path.display());
            }
            Ok((f, d))
        }
        (f, FileValue::Ensemble(e)) => Ok((f, convex_mix(&e))),
        (f, FileValue::Preparation(_)) => Err(wrong_kind(path, &f, "a ket, density or ensemble")),
    }
}

fn resolve_dims(flag: Option<BipartiteDims>, file: &StateFile) -> Result<BipartiteDims, CliError> {
    if let Some(d) = flag {
        return Ok(d);
    }
    match file.bipartite() {
        Some((a, b)) => Ok(BipartiteDims::new(a, b)?),
        None => Err(CliError::Usage("pass --dims AxB or give the file two dims".into())),
    }
}

fn dispatch(command: &Command, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let tol = &cfg.tolerance;
    let mut r = Report::new();
    match command {
        Command::Ptrace { file, dims, keep } => {
            let (f, rho) = load_density(file, tol, err)?;
            let dims = resolve_dims(*dims, &f)?;
            let keep = match keep {
                Keep::A => Subsystem::A,
                Keep::B => Subsystem::B,
            };
            let reduced = partial_trace(&rho, dims, keep)?;
            r.text("dims", dims.to_string()).text("keep", format!("{keep:?}"));
            r.matrix("reduced", reduced.matrix()).real("purity", purity(&reduced));
        }
        Command::Purity { file } => {
            let (_, rho) = load_density(file, tol, err)?;
            r.real("purity", purity(&rho)).text("is_pure", is_pure(&rho, tol).to_string());
            r.reals("spectrum", &rho.spectrum(tol).values);
        }
        Command::Schmidt { file, dims } => {
            let (f, psi) = load_ket(file, tol)?;
            let dims = resolve_dims(*dims, &f)?;
            let form = schmidt(&psi, dims, cfg.cutoff)?;
            r.text("dims", dims.to_string()).int("rank", form.rank()).reals("coefficients", &form.coeffs);
            r.kets("left", &form.left).kets("right", &form.right);
            r.real("reconstruction_error", form.reconstruction_error(&psi));
        }
        Command::Purify { file, ancilla } => {
            let (_, rho) = load_density(file, tol, err)?;
            let p = match ancilla {
                Some(n) => purify_with_ancilla(&rho, *n, tol)?,
                None => purify(&rho, tol),
            };
            let back = partial_trace(&projector(&p.state), p.dims, Subsystem::A)?;
            r.text("dims", p.dims.to_string()).ket("state", &p.state);
            r.real("marginal_error", back.distance(&rho));
        }
        Command::Ghjw { file, dims, ensemble } => {
            let (f, psi) = load_ket(file, tol)?;
            let dims = resolve_dims(*dims, &f)?;
            let target = load_ensemble(ensemble, tol)?;
            let steer = ghjw_steer(&psi, dims, &target, tol)?;
            let recovered: Vec<f64> = steer
                .ancilla_basis
                .iter()
                .map(|c| contract_ancilla(psi.amps(), dims, c.amps()).iter().map(|z| z.norm_sqr()).sum())
                .collect();
            r.text("dims", dims.to_string()).kets("ancilla_basis", &steer.ancilla_basis);
            r.matrix("unitary", &steer.unitary).reals("recovered_weights", &recovered);
            r.real("reconstruction_error", steer.reconstruction_error);
        }
        Command::LemmaUnitary { psi, phi, dims } => {
            let (f, psi) = load_ket(psi, tol)?;
            let (_, phi) = load_ket(phi, tol)?;
            let dims = resolve_dims(*dims, &f)?;
            let u = lemma_unitary(&psi, &phi, dims, tol)?;
            let mapped = Ket::new(mixtura::decompositions::apply_local(&u, phi.amps(), dims, Subsystem::B)?)?;
            let unitarity = (&u.dagger() * &u).distance(&Matrix::identity(dims.b));
            r.text("dims", dims.to_string()).matrix("unitary", &u);
            r.real("unitarity_residual", unitarity).real("mapping_residual", mapped.distance_up_to_phase(&psi));
        }
        Command::Mix { file } => {
            let target = load_ensemble(file, tol)?;
            let rho = convex_mix(&target);
            r.int("members", target.len()).matrix("rho", rho.matrix()).real("purity", purity(&rho));
        }
        Command::Scenario(s) => r = scenario(s, cfg)?,
        Command::Selftest => return selftest(cfg, out),
    }
    r.write(cfg.format, out).map_err(|e| CliError::Usage(format!("writing output: {e}")))
}

fn random_basis(rng: &mut ChaCha8Rng, n: usize) -> Vec<Ket> {
    let u = random::unitary(rng, n);
    (0..n).map(|j| Ket::new(u.col(j))).collect::<Result<_, _>>().expect("unitary columns are unit vectors")
}

fn scenario(s: &Scenario, cfg: &RunConfig) -> Result<Report, CliError> {
    let tol = &cfg.tolerance;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let report = match s {
        Scenario::Despagnat { a, b, random_bases } => {
            let (u, v) = if *random_bases {
                (random_basis(&mut rng, a.len()), random_basis(&mut rng, b.len()))
            } else {
                (standard_basis(a.len()), standard_basis(b.len()))
            };
            despagnat_scenario(&u, &v, a, b, &schmidt_diagonal_coeffs(a), tol)?
        }
        Scenario::Preparation { file } => match load(file, tol)? {
            (_, FileValue::Preparation(model)) => prepare_with_environment(&model, tol)?,
            (f, _) => return Err(wrong_kind(file, &f, "a preparation")),
        },
        Scenario::Premeasure { amps, file, pointer_dim, random_pointers } => {
            let amps: Vec<C64> = match (amps, file) {
                (Some(a), None) => a.iter().map(|&x| C64::new(x, 0.0)).collect(),
                (None, Some(path)) => load_ket(path, tol)?.1.into_amps(),
                _ => return Err(CliError::Usage("pass either --amps or --file".into())),
            };
            let n = amps.len();
            let dim = pointer_dim.unwrap_or(n);
            if dim < n {
                return Err(CliError::Usage(format!("{n} pointer states do not fit in dimension {dim}")));
            }
            let mut pointers = if *random_pointers { random_basis(&mut rng, dim) } else { standard_basis(dim) };
            pointers.truncate(n);
            premeasurement(&amps, &pointers, tol)?
        }
    };
    Ok(Report::scenario(&report))
}

fn selftest(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let outcomes = selftest::run_all(cfg.seed);
    let mut r = Report::new();
    for o in &outcomes {
        match cfg.format {
            Format::Text => {
                r.text(format!("criterion {}", o.id), o.to_string());
            }
            Format::Machine => {
                let key = format!("criterion.{}", o.id);
                r.text(format!("{key}.passed"), o.passed().to_string()).int(format!("{key}.cases"), o.cases);
                for m in &o.metrics {
                    r.real(format!("{key}.{}", m.label), m.value);
                }
                r.int(format!("{key}.failures"), o.failures.len());
            }
        }
    }
    r.write(cfg.format, out).map_err(|e| CliError::Usage(format!("writing output: {e}")))?;
    match outcomes.iter().filter(|o| !o.passed()).count() {
        0 => Ok(()),
        n => Err(CliError::SelftestFailed(n)),
    }
}
