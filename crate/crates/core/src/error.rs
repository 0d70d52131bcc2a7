use thiserror::Error;

use crate::diagram::DiagramError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("coordinate {coordinate} of state {state:#b} is already 1")]
    CoordinateAlreadyOne { state: u32, coordinate: usize },
    #[error("tensor factor {index} out of range for {k} factor(s)")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("merge operator needs two distinct factors, got {0} twice")]
    EqualIndices(usize),
    #[error("states {from:#b} -> {to:#b} do not form a cube edge along crossing {crossing}")]
    NotAnEdge { from: u32, to: u32, crossing: usize },
    #[error("face at state {state:#b} (crossings {i}, {j}): path composites are not proportional by a sign")]
    FaceNotProportional { state: u32, i: usize, j: usize },
    #[error("no sign assignment makes every face anticommute")]
    Unsolvable,
    #[error("symbol {0} does not belong to the resolution")]
    UnknownSymbol(String),
    #[error("induced map of crossing {crossing} at state {state:#b} leaves the target lattice")]
    BasisExpressionFailure { state: u32, crossing: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{what} = {value} exceeds the limit {limit}")]
    TooLarge { what: &'static str, value: usize, limit: usize },
    #[error("boundary composite at homological degree {h} is not zero")]
    NotAComplex { h: i32 },
    #[error("boundary at homological degree {h} does not preserve the quantum degree")]
    GradingViolation { h: i32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
