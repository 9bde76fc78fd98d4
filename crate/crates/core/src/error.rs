use thiserror::Error;

use crate::scalar::TropScalar;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("max weight is {max}, expected 0")]
    NotNormalized { max: TropScalar },

    #[error("weight {weight} is positive, weights must lie in [-inf, 0]")]
    PositiveWeight { weight: TropScalar },

    #[error("+inf is only a transient residuation value and cannot be stored")]
    PositiveInfinity,

    #[error("non-finite coordinate {value} in a point of a compactum")]
    NonFiniteCoordinate { value: TropScalar },

    #[error("convex parameters ({t}, {p}) are not in J: {reason}")]
    InvalidParams { t: TropScalar, p: TropScalar, reason: &'static str },

    #[error("outside validity region [{case}]: {constraint}")]
    OutsideValidityRegion { case: String, constraint: String },

    #[error("inconsistent fiber at coordinate {coordinate}: {detail}")]
    InconsistentFiber { coordinate: usize, detail: String },

    #[error("no zero-weight atom can be placed among the first k-1 atoms")]
    NoZeroWeightPrefix,

    #[error("atom {atom} is not covered by any cover element")]
    UncoveredAtom { atom: String },

    #[error("barycenter {point} escaped cover element {element}")]
    NonConvexElement { element: usize, point: String },

    #[error("search budget exceeded: {needed} candidates > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("atom without an embedding: {0}")]
    UnembeddedAtom(String),

    #[error("empty test family")]
    EmptyTestFamily,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn outside(case: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::OutsideValidityRegion { case: case.into(), constraint: constraint.into() }
    }

    /// Expected refusals of a partial construction, as opposed to bad input.
    pub fn is_validity_refusal(&self) -> bool {
        matches!(self, Error::OutsideValidityRegion { .. })
    }
}
