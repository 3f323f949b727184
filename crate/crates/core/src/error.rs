use crate::numeric::QuadError;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the command-line front end to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input or parameters.
    Config,
    /// A computation failed to reach its accuracy or completeness target.
    Numeric,
    /// A test function violates the support condition of a prediction.
    SupportGate,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {q} exceeds the configured maximum {max}")]
    ModulusTooLarge { q: u64, max: u64 },
    #[error("character mod {q} (index {index}) is not primitive")]
    NotPrimitive { q: u64, index: usize },
    #[error("argument {arg} is outside the prime table range [1, {limit}]")]
    OutOfRange { arg: f64, limit: u64 },
    #[error("residue {a} is not coprime to the modulus {q}")]
    NotCoprime { a: i64, q: u64 },
    #[error("pole at s = 1")]
    Pole,
    #[error("series evaluation lost accuracy: {0}")]
    AccuracyLoss(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("zero set for character mod {q} (index {index}) incomplete: expected {expected}, found {found}; unresolved intervals {gaps:?}")]
    IncompleteZeroSet {
        q: u64,
        index: usize,
        expected: i64,
        found: usize,
        gaps: Vec<(f64, f64)>,
    },
    #[error("support condition of `{source_name}` violated: {detail}")]
    SupportViolation { source_name: String, detail: String },
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("unknown prediction source `{0}`")]
    UnknownSource(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("polynomial degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ModulusTooLarge { .. }
            | Error::NotPrimitive { .. }
            | Error::OutOfRange { .. }
            | Error::NotCoprime { .. }
            | Error::Pole
            | Error::UnknownConstant(_)
            | Error::UnknownSource(_)
            | Error::DegreeTooLarge { .. }
            | Error::InvalidArgument(_) => ErrorKind::Config,
            Error::SupportViolation { .. } => ErrorKind::SupportGate,
            Error::AccuracyLoss(_)
            | Error::Quadrature(_)
            | Error::IncompleteZeroSet { .. }
            | Error::DegenerateFit(_)
            | Error::ZeroDenominator(_) => ErrorKind::Numeric,
        }
    }
}
