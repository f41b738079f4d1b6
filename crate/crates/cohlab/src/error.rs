use thiserror::Error;

/// Errors raised by the numerical kernel and the physics layers above it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |m - m^dagger| entry is {deviation:.3e} (tolerance {tolerance:.1e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("eigensolver failed to converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    NumericalFailure { sweeps: usize, residual: f64 },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("product dimension {requested} exceeds the configured cap {cap}")]
    DimensionOverflow { requested: usize, cap: usize },

    #[error("parameter out of range: {context}")]
    ParamOutOfRange { context: String },

    #[error("state validation failed: {context}")]
    InvalidState { context: String },

    #[error("ensemble validation failed: {context}")]
    InvalidEnsemble { context: String },

    #[error("operator is not a measurement operator (needs 0 <= L <= I): {context}")]
    NotAMeasurementOperator { context: String },

    #[error("ensemble member {index} does not factor as permutation x phases")]
    NotIncoherentEnsemble { index: usize },

    #[error("reference output is not diagonal: max off-diagonal modulus {deviation:.3e}")]
    NotIncoherentOutput { deviation: f64 },

    #[error("sequence symbol {symbol} has zero probability")]
    ZeroProbabilitySymbol { symbol: usize },

    #[error("enumeration too large: {requested} sequences exceed limit {limit}")]
    TooLarge { requested: u128, limit: u128 },

    #[error("malformed document: {context}")]
    Parse { context: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn dim_mismatch(context: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
        }
    }

    pub fn param(context: impl Into<String>) -> Self {
        Error::ParamOutOfRange {
            context: context.into(),
        }
    }
}
