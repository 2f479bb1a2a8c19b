use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families: malformed or inconsistent input
/// ([`Error::is_validation`]) and instances that are well formed but exceed a
/// configured cap or fall outside the regime the method applies to.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("generator {index} is the zero vector")]
    ZeroGenerator { index: usize },

    #[error("not focused: minimum cosine {min_cosine} at pair ({}, {}) is not positive", .witness.0, .witness.1)]
    NotFocused { min_cosine: f64, witness: (usize, usize) },

    #[error("focus certificate {actual} is below the claimed delta {claimed}")]
    DeltaBelowClaim { actual: f64, claimed: f64 },

    #[error("projected generator {index} is numerically zero on the subspace")]
    DegenerateRestriction { index: usize },

    #[error("odd order {0} where an even order is required")]
    OddOrder(usize),

    #[error("matrix order {order} exceeds the cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },

    #[error("term count {terms} exceeds the cap {cap}")]
    TermCapExceeded { terms: usize, cap: usize },

    #[error("subspace dimension {k} is outside 1..={n}")]
    BadSubspaceDimension { k: usize, n: usize },

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("method inapplicable: {0}")]
    Inapplicable(String),

    #[error("brute-force size {size} exceeds the cap {cap}")]
    EnumerationCapExceeded { size: u128, cap: u128 },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

impl Error {
    /// True for malformed input, false for cap and applicability failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidPolynomial(_)
                | Error::InvalidMatrix(_)
                | Error::InvalidConfig(_)
                | Error::ZeroGenerator { .. }
                | Error::BadSubspaceDimension { .. }
                | Error::OddOrder(_)
                | Error::DeltaBelowClaim { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
