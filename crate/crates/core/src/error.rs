use thiserror::Error;

/// Errors raised by the library. Validation failures (bad specs, bad
/// arguments) are distinguished from runtime failures by [`Error::is_validation`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("predicted group order {order} exceeds the enumeration cap {cap}")]
    OrderExceedsCap { order: u128, cap: usize },
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("lower central series did not reach the trivial subgroup")]
    NonNilpotent,
    #[error("rho needs at least two arguments, got {0}")]
    Arity(usize),
    #[error("subset is not contained in the reachable part of the Cayley graph")]
    Unreachable,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("generator multiset does not generate the group")]
    NotGenerating,
    #[error("generator multiset is not closed under inversion")]
    NotSymmetric,
    #[error("state space of size {size} exceeds the dense cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("walk entropy is not strictly increasing on the bracket [{lo}, {hi}]")]
    NonMonotoneBracket { lo: f64, hi: f64 },
    #[error("group has step {0}; step-2 collection needs step at most 2")]
    StepNotTwo(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no generating set of size {rank} found after {attempts} draws")]
    RankSamplingFailed { rank: usize, attempts: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed group file: {0}")]
    Format(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::OrderExceedsCap { .. }
                | Error::InvalidSpec(_)
                | Error::Arity(_)
                | Error::NotPrime(_)
                | Error::InvalidArgument(_)
                | Error::StepNotTwo(_)
                | Error::NotSymmetric
                | Error::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
