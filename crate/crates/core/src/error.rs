use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("interval straddles a half-integer; refine it before taking the torus distance")]
    AmbiguousInterval,

    #[error("quadratic values from different fields: sqrt({0}) and sqrt({1})")]
    IncompatibleFields(String, String),

    #[error("interval too wide to certify partial quotient {obtained_next}; {obtained} digits certified")]
    InsufficientPrecision {
        obtained: usize,
        obtained_next: usize,
    },

    #[error("requested depth {requested} but only {available} partial quotients are available")]
    DepthExceedsDigits { requested: usize, available: usize },

    #[error("input is rational; this operation needs an irrational number")]
    InputNotIrrational,

    #[error("input must be an exact quadratic irrational")]
    NotQuadratic,

    #[error("{m} points exceed the enumeration bound {cap}")]
    TooManyPoints { m: String, cap: u64 },

    #[error("no b in [1, {m}] with ||b*alpha - gamma|| <= 1/q_{k} found after all fallbacks")]
    SearchExhausted { k: usize, m: String },

    #[error("{what} = {requested} exceeds the configured cap {cap}")]
    ResourceCap {
        what: &'static str,
        requested: String,
        cap: String,
    },

    #[error("n = {0} is below 16, where log log log n is not positive")]
    DomainTooSmall(String),

    #[error("cannot parse {0:?}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
