use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid precision: {0} digits requested, at least 30 required")]
    InvalidPrecision(u32),

    #[error("root refinement did not converge: {0}")]
    NonConvergence(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("seed moment quadrature did not converge for rho={rho}")]
    SeedFailure { rho: usize },

    #[error("moment table too short: need {needed}, have {have}")]
    LengthError { needed: usize, have: usize },

    #[error("recurrence coefficient gamma_{index} = {value} is not positive")]
    PositivityBreak { index: usize, value: String },

    #[error("Hankel determinant of order {0} vanishes")]
    SingularHankel(usize),

    #[error("representation {rep} does not apply to the {family} family")]
    FamilyMismatch { rep: String, family: String },

    #[error("leading recursion coefficient vanishes at unexpected index {0}")]
    ZeroLeadingCoefficient(usize),

    #[error("potential is not quasi-exactly solvable")]
    NotQesType,

    #[error("row or column {index} outside extent {extent}")]
    ExtentError { index: usize, extent: usize },

    #[error("no roots found in window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("determinant not divisible by quantizer: relative remainder {0:e}")]
    NonFactorizable(f64),

    #[error("oracle did not converge: {0}")]
    NotConverged(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("parse failure: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
