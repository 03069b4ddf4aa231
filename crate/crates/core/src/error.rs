use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid isolating interval: {0}")]
    InvalidIsolatingInterval(String),

    #[error("precision exhausted: only {determined} of {requested} terms are certain")]
    PrecisionExhausted { determined: usize, requested: usize },

    #[error("too few convergents: need {needed}, have {have}")]
    TooFewConvergents { needed: usize, have: usize },

    #[error("depth cap exceeded: q_n would exceed {max_digits} decimal digits at depth {depth}")]
    DepthCapExceeded { depth: usize, max_digits: u64 },

    #[error("epsilon {0} outside (0, 1]")]
    EpsilonOutOfRange(f64),

    #[error("dimension {dim} exceeds the enumeration cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("cannot separate candidates after {retries} precision doublings")]
    PrecisionInsufficient { retries: u32 },

    #[error("spectrum incomplete: certified up to {certified}, threshold {threshold}")]
    IncompleteSpectrum { certified: f64, threshold: f64 },

    #[error("quadrature did not converge: last relative change {0:e}")]
    QuadratureNonConvergence(f64),

    #[error("inconsistent profile: {0}")]
    ProfileInconsistent(String),

    #[error("polynomial is not squarefree")]
    NotSquarefree,

    #[error("{0} is a perfect square")]
    PerfectSquare(i64),

    #[error("not an admissible unit: {0}")]
    NotUnit(String),

    #[error("not in G_v: {0}")]
    NotInGv(String),

    #[error("no real irrational eigenvalue at index {0}")]
    NoIrrationalEigenvalue(usize),

    #[error("integer overflow in lattice basis")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
