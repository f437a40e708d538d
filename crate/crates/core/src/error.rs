use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not antisymmetric (residual {residual:.3e})")]
    NotAntisymmetric { residual: f64 },

    #[error("{spins} spins exceeds the exact-diagonalization cap of {cap}")]
    SizeCap { spins: usize, cap: usize },

    #[error("ground state is ambiguous: |E_min| = {e_min:.3e} with strict filling")]
    AmbiguousFilling { e_min: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("g = {g} lies beyond the spin-wave instability threshold {threshold}")]
    BeyondInstability { g: f64, threshold: f64 },

    #[error("unknown task `{0}`")]
    UnknownTask(String),

    #[error("malformed table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
