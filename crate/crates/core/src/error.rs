use thiserror::Error;

/// Errors produced by the group engine and everything built on it.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("invalid lambda {lambda} for p={p}, m={m}, n={n}: {reason}")]
    InvalidLambda {
        p: u64,
        m: u32,
        n: u32,
        lambda: u64,
        reason: String,
    },

    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("matrix closure exceeded cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },

    #[error("group of order {order} is not a p-group")]
    NotAPGroup { order: u64 },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("mismatched groups: {0}")]
    MismatchedGroups(String),

    #[error("no lift of the first triple preserves the orders of x, y and z")]
    OrderPreservingLiftNotFound,

    #[error("no lift of the second triple generates the source group")]
    GeneratingLiftNotFound,

    #[error("verification failed (internal invariant broken): {0}")]
    VerificationFailed(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("incompatible lambda at level {level}: {reason}")]
    IncompatibleLambda { level: u32, reason: String },

    #[error("sum of lambda powers not divisible by p (p={p}, lambda={lambda}, x={x})")]
    NotDivisible { p: u64, lambda: u64, x: u64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("classification is only available for odd primes (got p={0})")]
    OddPrimeOnly(u64),

    #[error("isomorphism witness search failed for lambda={lambda}, lambda'={lambda_prime}")]
    WitnessSearchFailed { lambda: u64, lambda_prime: u64 },

    #[error("inconsistent cover: {0}")]
    InconsistentCover(String),

    #[error("invalid triangle signature: {0}")]
    InvalidSignature(String),

    #[error("no canonical surjection from {source_spec} onto {target_spec}")]
    NoSurjection {
        source_spec: String,
        target_spec: String,
    },

    #[error("no Beauville structure on {0}")]
    NoStructure(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
