use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("capacity exceeded: {what} (limit {limit}, got {got}){hint}")]
    Capacity {
        what: &'static str,
        limit: usize,
        got: usize,
        hint: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("site {0} appears more than once in the word")]
    RepeatedSite(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("state is not permutation symmetric (deviation {deviation:.3e})")]
    NotSymmetric { deviation: f64 },

    #[error("operator is not odd (even part norm {even_norm:.3e})")]
    NotOdd { even_norm: f64 },

    /// `residual` is that of the best nonnegative fit found.
    #[error("infeasible moment sequence: residual {residual:.3e}; most violated condition {condition} (min eigenvalue {min_eigenvalue:.3e})")]
    InfeasibleMoments {
        residual: f64,
        condition: String,
        min_eigenvalue: f64,
    },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("identity check failed: {0}")]
    IdentityViolation(String),
}

impl Error {
    pub(crate) fn capacity(what: &'static str, limit: usize, got: usize) -> Self {
        Error::Capacity {
            what,
            limit,
            got,
            hint: "",
        }
    }
}
