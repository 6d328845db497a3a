use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("root finder did not converge: {0}")]
    NonConvergence(String),
    #[error("degenerate function: {0}")]
    DegenerateFunction(String),
    #[error("numerator and denominator share a root near {0}")]
    NotCoprime(String),
    #[error("inconsistent ramification: {0}")]
    InconsistentRamification(String),
    #[error("critical values are not all on the extended real line: {0}")]
    NotFortunate(String),
    #[error("path is not a Jordan curve: {0}")]
    NotJordan(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("malformed map: {0}")]
    MalformedMap(String),
    #[error("Euler characteristic {0} is odd")]
    OddEuler(i64),
    #[error("map is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("map is not of the required kind: {0}")]
    WrongKind(String),
    #[error("inconsistent labelling: {0}")]
    InconsistentLabelling(String),
    #[error("empty admissible range [{lower}, {upper}]")]
    EmptyRange { lower: i64, upper: i64 },
    #[error("inconsistent map: {0}")]
    InconsistentMap(String),
    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),
    #[error("continuation paths collided: {0}")]
    PathJump(String),
    #[error("ambiguous endpoint snap: {0}")]
    AmbiguousSnap(String),
    #[error("missing coordinates: {0}")]
    MissingCoords(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Coarse error classes, used by the command-line front end for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NonConvergence(_)
            | Error::PathJump(_)
            | Error::AmbiguousSnap(_)
            | Error::InconsistentRamification(_) => ErrorClass::Numeric,
            _ => ErrorClass::Validation,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
