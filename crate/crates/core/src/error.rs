use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NonHermitian { deviation: f64 },
    #[error("negative value {value:e} passed to the entropy kernel")]
    NegativeInput { value: f64 },
    #[error("empty input")]
    EmptyInput,
    #[error("component {index} is negative ({value:e})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("components sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("rank {rank} outside 1..={dim}")]
    BadRank { rank: usize, dim: usize },
    #[error("state vector has zero norm")]
    ZeroVector,
    #[error("invalid lattice shape {0:?}")]
    BadShape(Vec<usize>),
    #[error("{n} components do not fit a lattice of {cells} cells")]
    ShapeTooSmall { n: usize, cells: usize },
    #[error("invalid cell assignment: {0}")]
    BadAssignment(String),
    #[error("not a permutation of 1..={0}")]
    NotAPermutation(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid axes {axes:?} for a {arity}-axis lattice")]
    BadAxes { axes: Vec<usize>, arity: usize },
    #[error("portrait matrix does not match the placement lattice")]
    ShapeMismatch,
    #[error("portrait matrices are only materialized for lattices of at most 16 cells (got {0})")]
    PortraitTooLarge(usize),
    #[error("expected a {expected}-axis placement, found {found} axes")]
    ArityMismatch { expected: usize, found: usize },
    #[error("exhaustive scan over {n}! permutations exceeds the budget")]
    BudgetTooLarge { n: usize },
    #[error("group index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("index {index} appears in more than one group of a family")]
    OverlappingGroups { index: usize },
    #[error("invalid spin 2j = {two_j}")]
    BadSpin { two_j: usize },
    #[error("dimension {0} is not 2j+1 for a supported spin")]
    BadDimension(usize),
    #[error("no preset inequality for 2j = {two_j}")]
    UnsupportedSpin { two_j: usize },
}
