use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("coefficient precision must be at least 1")]
    ZeroPrecision,

    /// p^N must fit the fixed-width residue representation.
    #[error("modulus {p}^{precision} is too large for the residue representation")]
    ModulusTooLarge { p: u64, precision: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series contexts differ (p={left_p}, N={left_n} vs p={right_p}, N={right_n})")]
    ContextMismatch {
        left_p: u64,
        left_n: u32,
        right_p: u64,
        right_n: u32,
    },

    #[error("exponent {exponent} lies at or beyond the pi-precision {precision}")]
    ExponentOutOfRange { exponent: i64, precision: i64 },

    #[error("series is not invertible: leading coefficient is not a p-adic unit")]
    NonInvertible,

    #[error("pi-precision {have} too low, need at least {need}")]
    PrecisionTooLow { need: i64, have: i64 },

    #[error("composition count {count} exceeds enumeration guard {guard}")]
    EnumerationTooLarge { count: String, guard: u64 },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("expression parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("report serialization failed: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
