use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("insufficient history: need at least {needed} observations, have {have}")]
    InsufficientHistory { needed: usize, have: usize },
    #[error("non-positive price {value} for asset {asset} at row {row}")]
    NonPositivePrice { asset: usize, row: usize, value: f64 },
    #[error("portfolio variance is zero")]
    ZeroVariancePortfolio,
    #[error("all asset risks are zero")]
    DegenerateRisk,
    #[error("problem is infeasible")]
    Infeasible,
    #[error("problem is unbounded")]
    Unbounded,
    #[error("solution bank is empty")]
    EmptyBank,
    #[error("point lies outside the domain at coordinate {index}")]
    OutOfBounds { index: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("unsupported problem: {0}")]
    Unsupported(String),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
