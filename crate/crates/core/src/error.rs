use thiserror::Error;

/// Errors raised by the engine. Every variant maps to a CLI exit code via [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a subspace: {0}")]
    NotSubspace(String),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("representation is not functorial: {0}")]
    NotFunctorial(String),
    #[error("morphism is not natural: {0}")]
    NotNatural(String),
    #[error("map is not invertible: {0}")]
    NotInvertible(String),
    #[error("not a contraction: {0}")]
    NotContraction(String),
    #[error("gluing condition violated: {0}")]
    Gluing(String),
    #[error("admissibility violated at degree {degree}: incomparable elements {first} and {second} below it")]
    Admissibility {
        degree: String,
        first: String,
        second: String,
    },
    #[error("anchor value at {anchor} does not match the module at degree {degree}")]
    Completion { anchor: String, degree: String },
    #[error("degree {0} is not finite")]
    InfiniteDegree(String),
    #[error("invalid module data: {0}")]
    InvalidModule(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("lift axiom violated: {0}")]
    LiftAxiom(String),
    #[error("search window too large: {0}")]
    WindowTooLarge(String),
    #[error("module is not finitely generated: {0}")]
    NotFinitelyGenerated(String),
    #[error("certificate failure: {0}")]
    Certificate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Process exit code: 2 validation failure, 3 certificate failure, 4 parse error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Certificate(_) => 3,
            Error::Parse(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
