use thiserror::Error;

/// Errors produced by space construction, correspondence handling, the solver
/// and the lattice routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("a metric space needs at least one point")]
    EmptySpace,
    #[error("non-zero diagonal entry at ({0},{0})")]
    NonZeroDiagonal(usize),
    #[error("asymmetric entries at ({0},{1})")]
    Asymmetric(usize, usize),
    #[error("negative or non-finite entry at ({0},{1})")]
    NegativeEntry(usize, usize),
    #[error("triangle inequality violated at ({0},{1},{2})")]
    TriangleViolation(usize, usize, usize),
    #[error("points must be strictly increasing and finite (index {0})")]
    NotStrictlyIncreasing(usize),
    #[error("scale factor must be a finite non-negative number, got {0}")]
    NegativeScale(f64),
    #[error("added constant must be positive, got {0}")]
    NonPositiveConstant(f64),
    #[error("space of {size} points exceeds the cap of {cap}")]
    SizeOverflow { size: usize, cap: usize },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("pairing is not a bijection")]
    NonBijectivePairing,
    #[error("index pair ({0},{1}) out of range")]
    IndexOutOfRange(usize, usize),
    #[error("relation is empty")]
    EmptyRelation,
    #[error("relation does not cover {side} point {index}")]
    NotACorrespondence { side: char, index: usize },
    #[error("subset is empty")]
    EmptySubset,
    #[error("instance {n_x}x{n_y} exceeds the cap of {cap} index pairs")]
    CapExceeded { n_x: usize, n_y: usize, cap: usize },
    #[error("lattice dimension {0} exceeds the enumeration cap")]
    DimensionCapExceeded(usize),
    #[error("enumeration box for radius {0} is too large")]
    BoxTooLarge(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
