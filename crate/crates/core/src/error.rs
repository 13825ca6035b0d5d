use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter N must be an integer >= 2, got {0}")]
    InvalidParameter(u64),

    #[error("{what} = {value} is outside {domain}")]
    Domain {
        what: &'static str,
        value: String,
        domain: &'static str,
    },

    #[error("digit {digit} at position {position} is below N = {n}")]
    DigitBelowParameter { digit: u64, position: usize, n: u64 },

    #[error("cannot evaluate an empty digit sequence")]
    EmptyDigits,

    #[error("digit at position {0} does not fit in 64 bits")]
    DigitOverflow(usize),

    #[error("grid needs at least {min} intervals, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("grid function kind mismatch: expected {expected}")]
    WrongKind { expected: &'static str },

    #[error("CDF values decrease after node {0}")]
    NonMonotone(usize),

    #[error("CDF endpoint {which} = {value} is not within tolerance of {expected}")]
    BadEndpoint {
        which: &'static str,
        value: f64,
        expected: f64,
    },

    #[error("non-finite value at grid node {0}")]
    NonFinite(usize),

    #[error("initial density has zero derivative everywhere")]
    DegenerateDensity,

    #[error("tail cutoff {cutoff} must be at least N = {n}")]
    InvalidCutoff { cutoff: u64, n: u64 },

    #[error("Hurwitz zeta is only implemented for s in {{2, 3}}, got s = {0}")]
    UnsupportedZetaOrder(u32),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("q_N enclosure for N = {n} escapes its analytic bounds ({detail})")]
    SandwichViolated { n: u64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: impl ToString, domain: &'static str) -> Error {
    Error::Domain {
        what,
        value: value.to_string(),
        domain,
    }
}
