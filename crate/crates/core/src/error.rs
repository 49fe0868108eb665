use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("modulus {0} is not an odd prime below 2^62")]
    InvalidModulus(u64),
    #[error("characteristic {characteristic} is too small: integers 1..{required} must be invertible")]
    CharacteristicTooSmall { characteristic: u64, required: u64 },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("series is not invertible: constant term is zero")]
    NotInvertible,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("constant term matrix is singular")]
    SingularMatrix,
    #[error("t = 0 is not an ordinary point: leading coefficient vanishes at 0")]
    NotOrdinaryPoint,
    #[error("inconsistent base case: shift is 0 but right-hand side has nonzero constant term")]
    InconsistentBaseCase,
    #[error("Pade approximation failed: denominator vanishes at 0")]
    PadeFailure,
    #[error("final residual is nonzero from order {0}")]
    ResidualNonzero(usize),
    #[error("engine `{engine}` cannot solve {what}")]
    EngineUnsupported { engine: String, what: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
