use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate box: width {width}, height {height}")]
    DegenerateBox { width: f64, height: f64 },

    #[error("mesh size must be positive and finite, got {0}")]
    InvalidMeshSize(f64),

    #[error("facet {0} is a boundary facet: no patch")]
    NoPatch(usize),

    #[error("non-finite level set value {value} at vertex {vertex}")]
    NonFiniteLevelSet { vertex: usize, value: f64 },

    #[error("element is not cut by the zero level set")]
    NotCut,

    #[error("unsupported quadrature degree {0}; supported degrees: 1, 2, 4, 6")]
    UnsupportedDegree(usize),

    #[error("step {step}: vertex {vertex} of element {element} has no dof (containment violated)")]
    MissingDof {
        step: usize,
        element: usize,
        vertex: usize,
    },

    #[error("stabilised facet {facet} has neighbour element {element} outside the active mesh")]
    InactiveFacetNeighbour { facet: usize, element: usize },

    #[error(
        "step {step}: element {element} of the physical domain at step {old_step} is not in the active mesh"
    )]
    ContainmentViolation {
        step: usize,
        old_step: usize,
        element: usize,
    },

    #[error("step {step}: {source}")]
    Solve {
        step: usize,
        #[source]
        source: SolveError,
    },

    #[error("t_end / dt = {ratio} is not a positive integer")]
    NonIntegralSteps { ratio: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step {step}: observer failed: {message}")]
    Observer { step: usize, message: String },
}

/// Failure of a linear solve, with the residual history seen so far.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} (relative residual history: {residuals:?})")]
pub struct SolveError {
    pub kind: SolveErrorKind,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveErrorKind {
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("right-hand side has length {found}, expected {expected}")]
    RhsLength { expected: usize, found: usize },
    #[error("zero or tiny pivot {pivot:e} at row {row}")]
    SingularPivot { row: usize, pivot: f64 },
    #[error("iterative solver stagnated after {iterations} iterations")]
    Stagnation { iterations: usize },
    #[error("residual {achieved:e} above tolerance {tolerance:e}")]
    ResidualTooLarge { achieved: f64, tolerance: f64 },
    #[error("non-finite value in solution")]
    NonFinite,
}
