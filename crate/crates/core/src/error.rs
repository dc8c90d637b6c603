use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

/// One reason a surface description failed validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NonSymmetric {
        row: usize,
        col: usize,
    },
    WrongSignature {
        positive: usize,
        negative: usize,
        zero: usize,
    },
    EmptyAmpleCone(String),
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonSymmetric { row, col } => {
                write!(f, "gram is not symmetric at ({row}, {col})")
            }
            Violation::WrongSignature {
                positive,
                negative,
                zero,
            } => write!(
                f,
                "wrong signature: observed ({positive}, {negative}) with {zero} null directions"
            ),
            Violation::EmptyAmpleCone(why) => write!(f, "empty ample cone: {why}"),
            Violation::DimensionMismatch {
                what,
                expected,
                found,
            } => {
                write!(f, "{what}: expected length {expected}, found {found}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid surface: {}", list(.0))]
    InvalidSurface(Vec<Violation>),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("class [{}] is not ample", crate::rational::join(.0, ", "))]
    NotAmple(Vec<Rational>),
    #[error("rank must be positive, got {0}")]
    NonpositiveRank(i64),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("start point is not certified inside the region: {0}")]
    NotInside(String),
    #[error("empty grid: {0}")]
    EmptyGrid(String),
    #[error("norm matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn list(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
