use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: String },

    #[error("invalid base {0}: digit sums need q >= 2")]
    InvalidBase(u64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sieve of {entries} entries needs {requested} bytes, budget is {budget} bytes")]
    MemoryBudgetExceeded {
        entries: u64,
        requested: u64,
        budget: u64,
    },

    #[error("{what}: {value} exceeds the guard limit {limit}")]
    GuardExceeded {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported growth class: {0}")]
    UnsupportedGrowth(String),

    #[error("growth bound violated at n = {n}: {detail}")]
    GrowthViolated { n: u64, detail: String },

    #[error("malformed word: {0}")]
    MalformedWord(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("series constant too coarse: {0}")]
    SeriesPrecisionInsufficient(String),
}
