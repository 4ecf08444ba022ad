use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("malformed state file: {0}")]
    MalformedInput(String),

    #[error("coefficient vector is zero")]
    ZeroVector,

    #[error("squared norm {norm_sq} deviates from 1 by more than {tolerance:e}; pass an explicit renormalize request")]
    NormDeviation { norm_sq: f64, tolerance: f64 },

    #[error("{what} = {value} is outside its admissible range {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("state needs {amplitudes} amplitudes, cap is {cap}")]
    SizeCap { amplitudes: u128, cap: usize },

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("reduced state has rank {rank}, expected at most 2 (input is not a GW reduction)")]
    RankTooLarge { rank: usize },

    #[error("reduced state has weight {leakage:e} outside the effective two-qubit support")]
    EffectiveSupport { leakage: f64 },

    #[error("hypothesis `{name}` not satisfied: {detail}")]
    HypothesisRefused { name: String, detail: String },

    #[error("minimizer did not converge within {sweeps} sweeps on any of {restarts} restarts")]
    NonConvergence { sweeps: usize, restarts: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn refused(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::HypothesisRefused {
            name: name.into(),
            detail: detail.into(),
        }
    }
}
