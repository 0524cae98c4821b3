use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimensions must be positive (n={n}, m={m}, capacities={capacities:?})")]
    NonPositiveDimension { n: usize, m: usize, capacities: Vec<u64> },
    #[error("supply {supply} is smaller than the number of agents {agents}")]
    SupplyShortfall { agents: usize, supply: u64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("mixing factor {0} lies outside [0,1]")]
    BetaOutOfRange(String),
    #[error("bound r must be positive")]
    RZero,
    #[error("bound r = {0} lies outside (0,1]")]
    ROutOfRange(String),
    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),
    #[error("invalid preference order: {0}")]
    InvalidPreference(String),
    #[error("profile has {found} orders but the setting has {expected} agents")]
    ProfileLength { expected: usize, found: usize },
    #[error("decomposition failed: {0}")]
    DecompositionFailure(String),
    #[error("{what} needs {required} units of work, budget is {budget}")]
    SettingTooLarge { what: String, required: u128, budget: u128 },
    #[error("utility vector is not consistent with the reported preference order")]
    InconsistentUtility,
    #[error("utility vector has equal values for distinct objects")]
    UtilityTies,
    #[error("mechanism is not URBI(r)-partially strategyproof for any probed r >= {floor}")]
    NotPartiallySp { floor: String },
    #[error("pair is not hybrid-admissible: {0}")]
    NotHybridAdmissible(String),
    #[error("invalid rank valuation: {0}")]
    InvalidValuation(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}
