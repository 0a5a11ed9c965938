use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid coordinate map: {0}")]
    InvalidCoordinateMap(String),

    #[error("invalid weight system: {0}")]
    InvalidWeights(String),

    #[error("polynomial is not weighted homogeneous for the given weights")]
    NotHomogeneous,

    #[error("polynomial is not reduced: factor {factor} has multiplicity {multiplicity}")]
    NotReduced { factor: String, multiplicity: u32 },

    #[error("polynomial is zero or constant")]
    Degenerate,

    #[error("derivation {index} is not logarithmic along the divisor")]
    NotLogarithmic { index: usize },

    #[error("expected {expected} derivations, got {found}")]
    WrongBasisSize { expected: usize, found: usize },

    #[error("suspension cannot be straightened by a weighted homogeneous change: {0}")]
    NonHomogeneousStraightening(String),

    #[error("Lie algebra closure exceeded the dimension cap {cap}")]
    CapExceeded { cap: usize },

    #[error("generator {index} is not weighted homogeneous")]
    InhomogeneousGenerator { index: usize },

    #[error("Euler derivation is not in the span of the Lie algebra")]
    EulerNotInSpan,

    #[error("coefficient of a derivation on lowest-weight slot {slot} is not linear in the lowest-weight variables")]
    NonlinearOnLowestWeight { slot: usize },

    #[error("field extension required: irreducible factor {polynomial} of degree {degree}")]
    FieldExtension { polynomial: String, degree: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("linear system has no solution: {0}")]
    Infeasible(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn at_stage(self, stage: &str) -> Error {
        Error::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
