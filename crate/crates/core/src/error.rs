use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("temperature must be positive and finite (got {0})")]
    NonPositiveTemperature(f64),
    #[error("need at least 2 producers (got {0})")]
    TooFewProducers(u32),
    #[error("payoff_short must exceed payoff_long (got {short} <= {long})")]
    PayoffOrdering { short: f64, long: f64 },
    #[error("payoffs must be finite")]
    NonFinitePayoff,
    #[error("corn count {count} outside [0, {n}]")]
    StateOutOfRange { count: u32, n: u32 },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("k = {k} outside [0, {n}]")]
    InvalidOutcome { k: u64, n: u64 },
    #[error("payoff vector is empty")]
    EmptyPayoffs,
    #[error("log-odds undefined: frequency {0} is not strictly positive")]
    ZeroFrequency(f64),
    #[error("log-odds needs exactly 2 actions (got {0})")]
    NotBinary(usize),
    #[error("kernel for {0} producers exceeds the dense size limit of {max}", max = crate::kernel::MAX_DENSE_PRODUCERS)]
    KernelTooLarge(u32),
    #[error("power iteration did not converge after {iters} iterations (residual {residual:e})")]
    NotConverged { iters: usize, residual: f64 },
    #[error("singular system: {0}")]
    Singular(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("Gini coefficient undefined: total income is zero")]
    UndefinedGini,
    #[error("payoff_long must be non-negative for income analysis (got {0})")]
    NegativeIncome(f64),
    #[error("burn-in must be less than periods (burn-in {burn_in}, periods {periods})")]
    BurnIn { burn_in: usize, periods: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for the numerical failures the CLI maps to its own exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::Singular(_) | Error::UndefinedGini
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
