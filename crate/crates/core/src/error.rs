use thiserror::Error;

/// Errors produced by the library. Every fallible operation returns this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atom '{label}' has invalid weight {value}")]
    InvalidWeight { label: String, value: f64 },

    #[error("{which} weights sum to {sum}, expected 1 within 1e-9")]
    NotNormalized { which: &'static str, sum: f64 },

    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),

    #[error("{labels} labels but {weights} weights")]
    LengthMismatch { labels: usize, weights: usize },

    #[error("distribution has no atoms")]
    Empty,

    #[error("invalid order {0}: must be a finite nonnegative number or infinity")]
    InvalidOrder(f64),

    #[error("order {0} not supported by this operation")]
    UnsupportedOrder(String),

    #[error("reference measure has a singular part: atom '{0}' has p > 0 and q = 0")]
    SingularReference(String),

    #[error("order grid is not sorted ascending at position {0}")]
    UnsortedGrid(usize),

    #[error("evaluation point {0} outside [0, 1]")]
    OutOfRange(f64),

    #[error("first distribution does not majorize the second")]
    NotMajorized,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition {0} in the chain does not refine its predecessor")]
    NonRefiningChain(usize),

    #[error("empty list of pairs")]
    EmptyList,

    #[error("{count} factors exceed the bound of {bound}")]
    TooManyFactors { count: usize, bound: usize },

    #[error("invalid rho {0}: must lie in (-1, 0) or (0, inf)")]
    InvalidRho(f64),

    #[error("guess value for atom '{0}' is zero but the atom has positive P-mass and rho < 0")]
    ZeroGuess(String),

    #[error("no guess value for atom '{0}'")]
    MissingGuess(String),

    #[error("type-class count {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("{0} atoms exceed the permutation limit")]
    PermutationLimit(usize),

    #[error("reference measure is not uniform")]
    NonUniformReference,

    #[error("label sets of the two distributions differ")]
    LabelMismatch,

    #[error("curve breakpoints do not lie on the 1/{0} grid")]
    NotRealizable(usize),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("n_atoms must be at least 1")]
    ZeroAtoms,
}

pub type Result<T> = std::result::Result<T, Error>;
