use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {what} exceeds the magnitude limit {limit}")]
    OverflowBeyondLimit { what: String, limit: u64 },

    #[error("could not separate {what} from an integer at {bits} bits")]
    PrecisionExhausted { what: String, bits: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("range ({lo}, {hi}] exceeds the configured limit {limit}")]
    RangeTooLarge { lo: u64, hi: u64, limit: u64 },

    #[error("{n} is outside the factor table (limit {limit})")]
    OutOfTableRange { n: u64, limit: u64 },

    #[error("sieve weight support exceeds {limit} entries")]
    SupportTooLarge { limit: usize },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("phase undefined at t = {t}: {reason}")]
    PhaseDomainError { t: f64, reason: String },

    #[error("coefficient table of size {size} exceeds {limit}")]
    TableTooLarge { size: u64, limit: u64 },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
}
