use thiserror::Error;

/// Errors produced by construction and by the numeric operations.
///
/// Construction of any domain type with a violated invariant fails loudly
/// with one of these; the only silent normalization anywhere is the
/// documented drop of zero-mass atoms in
/// [`DiscreteDistribution`](crate::DiscreteDistribution).
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mismatched cell index sets between joint distributions")]
    MismatchedCells,

    #[error("unknown cell id ({0}, {1})")]
    UnknownCell(usize, usize),

    #[error(
        "enumeration guard exceeded: {outcomes} count vectors for K={k}, n={n} (limit {limit})"
    )]
    EnumerationGuard {
        k: usize,
        n: u64,
        outcomes: u128,
        limit: u128,
    },

    #[error("subset search guard exceeded: {0} cells (limit {1})")]
    SubsetGuard(usize, usize),

    #[error("procedure table has no entry for count vector {0:?}")]
    MissingTableEntry(Vec<u64>),

    #[error("zero-mass conditioning column {0}")]
    ZeroMassColumn(usize),

    #[error("singular covariance: {deficient} of {dim} eigenvalues below cutoff")]
    SingularCovariance { deficient: usize, dim: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
