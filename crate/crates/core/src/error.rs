use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the library. Every variant has a stable short name
/// (see [`Error::name`]) that front ends use for one-line diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("invalid tolerance (abs={abs}, rel={rel}): both must be >= 0 and one > 0")]
    InvalidTolerance { abs: f64, rel: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (||m - m^dagger||_F = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix has a negative eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace {trace} is not 1")]
    TraceNotUnit { trace: f64 },

    #[error("vector is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("vector vanishes (norm {norm:e}): amplitudes cancel")]
    ZeroVector { norm: f64 },

    #[error("vectors are not orthonormal (Gram residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("weights sum to {sum}, not 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("weight {weight} is outside (0, 1]")]
    InvalidWeight { weight: f64 },

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("kets {first} and {second} are not distinct (overlap {overlap})")]
    DuplicateKet { first: usize, second: usize, overlap: f64 },

    #[error("reduced states differ (||rho_A(psi) - rho_A(phi)||_F = {gap:e})")]
    MarginalsDiffer { gap: f64 },

    #[error("ensemble does not mix to the reduced state (gap {gap:e})")]
    NotADecomposition { gap: f64 },

    #[error("{kets} ensemble members need an ancilla of dimension >= {kets}, have {ancilla_dim}")]
    AncillaTooSmall { kets: usize, ancilla_dim: usize },

    #[error("weights {weights:?} are degenerate")]
    DegenerateWeights { weights: Vec<f64> },

    #[error("pure state does not reproduce the requested marginals (gap {gap:e})")]
    MarginalMismatch { gap: f64 },
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFinite { .. } => "NonFinite",
            Error::InvalidTolerance { .. } => "InvalidTolerance",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPositive { .. } => "NotPositive",
            Error::TraceNotUnit { .. } => "TraceNotUnit",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::ZeroVector { .. } => "ZeroVector",
            Error::NotOrthonormal { .. } => "NotOrthonormal",
            Error::WeightsNotNormalized { .. } => "WeightsNotNormalized",
            Error::InvalidWeight { .. } => "InvalidWeight",
            Error::EmptyEnsemble => "EmptyEnsemble",
            Error::DuplicateKet { .. } => "DuplicateKet",
            Error::MarginalsDiffer { .. } => "MarginalsDiffer",
            Error::NotADecomposition { .. } => "NotADecomposition",
            Error::AncillaTooSmall { .. } => "AncillaTooSmall",
            Error::DegenerateWeights { .. } => "DegenerateWeights",
            Error::MarginalMismatch { .. } => "MarginalMismatch",
        }
    }
}
