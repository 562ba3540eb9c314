use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants fall into three families that the CLI maps to exit codes:
/// validation (bad input), mathematical (singular systems, point
/// collisions) and internal consistency (a failed exact division, which
/// only happens when an identity the construction relies on is violated).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error(
        "polynomial in h is not divisible by h^{power}: coefficient of h^{index} is {coefficient}"
    )]
    NotDivisible {
        power: usize,
        index: usize,
        coefficient: String,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for {dim} variables")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("not a lower set: {element:?} is present but its predecessor {missing:?} is not")]
    NotLowerSet {
        element: Vec<u32>,
        missing: Vec<u32>,
    },

    #[error("invalid exponent ladder: {0}")]
    InvalidLadder(String),

    #[error("invalid coefficient table: {0}")]
    InvalidTable(String),

    #[error("direction frame is singular (rank {rank} < {dim})")]
    SingularFrame { rank: usize, dim: usize },

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid range basis: {0}")]
    InvalidBasis(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("point collision at h = {h}: points {first} and {second} coincide")]
    Collision {
        h: String,
        first: usize,
        second: usize,
    },

    #[error("gram matrix is singular: rank {rank} < {size}")]
    GramSingular { rank: usize, size: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    /// Another error, tagged with where in the input it arose.
    #[error("{location}: {inner}")]
    At { location: String, inner: Box<Error> },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Mathematical,
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::At { inner, .. } => inner.kind(),
            Error::NotDivisible { .. } | Error::Inconsistent(_) => ErrorKind::Internal,
            Error::DivisionByZero | Error::Collision { .. } | Error::GramSingular { .. } => {
                ErrorKind::Mathematical
            }
            _ => ErrorKind::Validation,
        }
    }

    /// Exit code: 1 validation, 2 mathematical, 3 internal consistency.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Validation => 1,
            ErrorKind::Mathematical => 2,
            ErrorKind::Internal => 3,
        }
    }
}

impl Error {
    pub fn at(self, location: impl Into<String>) -> Error {
        Error::At {
            location: location.into(),
            inner: Box::new(self),
        }
    }

    /// The innermost error, with locations stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::At { inner, .. } => inner.root(),
            e => e,
        }
    }
}

/// Tags the error of a `Result` with a location.
pub trait Locate<T> {
    fn at(self, location: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Locate<T> for Result<T> {
    fn at(self, location: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| e.at(location()))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
