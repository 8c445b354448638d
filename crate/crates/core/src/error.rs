use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("factorial ratio ({n}+{k})!/{n}! is not representable as f64")]
    Overflow { n: i64, k: usize },

    #[error("associated Laguerre L_{s}^{a} has superscript below -{s}; use the mu symmetry instead")]
    LaguerreOrder { s: usize, a: i64 },

    #[error("cutoff N = {cutoff} is too small for k = {k} (need N >= {min})")]
    CutoffTooSmall { cutoff: usize, k: usize, min: usize },

    #[error("guard {guard} leaves no interior below cutoff {cutoff} for k = {k}")]
    EmptyInterior { cutoff: usize, k: usize, guard: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("unsupported by the closed-form path: {0}")]
    Unsupported(String),

    #[error("initial state is not separable: {0}")]
    NotSeparable(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
