use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("nilpotency class {0} is not supported (BCH is tabulated through class 4)")]
    UnsupportedClass(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("reduced action {index} is not invertible mod {prime}")]
    NonInvertibleAction { prime: u64, index: usize },
    #[error("{what} exceeded budget {budget}")]
    BudgetExceeded { what: &'static str, budget: u64 },
    #[error("element is not in K")]
    NotInK,
    #[error("element is the identity")]
    Identity,
    #[error("no admissible prime below {0}")]
    NoCandidatePrime(u64),
    #[error("denominator divisible by {0}")]
    DenominatorDivisibleByP(u64),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid group description: {0}")]
    Invalid(String),
    #[error("need at least {needed} data points with r >= 3, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::UnsupportedClass(_) => "unsupported_class",
            Error::Precondition(_) => "precondition",
            Error::NonInvertibleAction { .. } => "non_invertible_action",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::NotInK => "not_in_k",
            Error::Identity => "identity",
            Error::NoCandidatePrime(_) => "no_candidate_prime",
            Error::DenominatorDivisibleByP(_) => "denominator_divisible_by_p",
            Error::VerificationFailed(_) => "verification_failed",
            Error::UnsupportedFamily(_) => "unsupported_family",
            Error::Schema(_) => "schema",
            Error::Invalid(_) => "invalid",
            Error::InsufficientPoints { .. } => "insufficient_points",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
