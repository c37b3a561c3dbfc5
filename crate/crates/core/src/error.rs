use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },

    #[error("{value} is not congruent to 1 modulo p = {p}")]
    NotOnePlusP { value: u64, p: u64 },

    #[error("binomial needs {needed} p-adic digits, only {available} supplied")]
    InsufficientDigits { needed: usize, available: usize },

    #[error("matrix is not in the first congruence subgroup: {0}")]
    NotInGroup(String),

    #[error("operands live in different contexts or bases")]
    ContextMismatch,

    #[error("element is zero")]
    ZeroElement,

    #[error("no nonzero homogeneous part of degree <= {bound}")]
    DegreeExceedsBound { bound: u64 },

    #[error("element is not homogeneous")]
    NotHomogeneous,

    #[error("precision too low: {0}")]
    PrecisionTooLow(String),

    #[error("polynomial is not a polynomial in the p^{s}-th powers of Y{var}")]
    NotAPthPowerPolynomial { var: usize, s: u32 },

    #[error("division by the zero polynomial")]
    ZeroDivisor,

    #[error("decomposition hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension {dim} exceeds the exact-mode cap {cap}")]
    DimensionCapExceeded { dim: u128, cap: u128 },

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
