use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision {got} bits is below the minimum of {min}")]
    PrecisionTooLow { got: u32, min: u32 },
    #[error("base must be a positive rational")]
    NonPositiveBase,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no certified tail bound beyond index {0}")]
    UncertifiableTail(u64),
    #[error("no certified sup bound for the coefficient sequence")]
    UncertifiableSup,
    #[error("exponent k = {0} must exceed 2")]
    KTooSmall(String),
    #[error("no witness certified for j <= {0}")]
    Exhausted(u64),
    #[error("exact reduction failed: {0}")]
    ReductionFailed(String),
    #[error("input vectors are linearly dependent on the window")]
    DependentInput,
    #[error("leading coordinate {index} of vector {vector} could not be certified nonzero")]
    IndeterminateLeading { vector: usize, index: u64 },
    #[error("no certified nonzero coordinate after index {0} within the window")]
    IndeterminateWindow(u64),
    #[error("pivot coordinate of z could not be certified nonzero")]
    ZDenominatorIndeterminate,
    #[error("window {window} too small: construction needs index {needed}")]
    WindowExhausted { window: u64, needed: u64 },
    #[error("oracle failure: {0}")]
    OracleFailure(String),
    #[error("no common zeros within window {0}")]
    NoCommonZeros(u64),
    #[error("pivot coordinate {0} is not a single monomial")]
    NonMonomialPivot(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
