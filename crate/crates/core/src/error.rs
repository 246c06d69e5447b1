use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// sup φ ≤ 0: the analytic lower singular-value bound carries no information.
    #[error(
        "vacuous certificate: sup phi = {c:e} is not positive (lambda' = {lambda_eff}, mu = {mu})"
    )]
    Vacuous { c: f64, lambda_eff: f64, mu: f64 },

    /// Exhaustive enumeration would visit more subsets than the configured cap.
    #[error(
        "enumeration of C({n_cols}, {k}) = {count} subsets exceeds cap {cap}; use sampled mode"
    )]
    EnumerationCap {
        n_cols: usize,
        k: usize,
        count: u128,
        cap: u128,
    },

    #[error("index {index} out of range for {cols} columns")]
    IndexOutOfRange { index: usize, cols: usize },

    /// The singular value computation did not meet its residual criterion.
    #[error("singular value computation failed: residual {residual:e} exceeds {limit:e}")]
    Decomposition { residual: f64, limit: f64 },

    #[error("malformed matrix dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` wrapper that is `Clone + PartialEq` by message.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct IoError(pub String);

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError(e.to_string()))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
