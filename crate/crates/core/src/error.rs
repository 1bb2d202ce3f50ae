use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parity entries must be 0 or 1, found {0}")]
    InvalidParity(u8),
    #[error("graded space must have dimension at least 1")]
    EmptySpace,
    #[error("matrix is {rows}x{cols} but the space has dimension {dim}")]
    Shape { rows: usize, cols: usize, dim: usize },
    #[error("operands live on different graded spaces ({left} vs {right})")]
    SpaceMismatch { left: usize, right: usize },
    #[error("matrix is not hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not odd with respect to the grading (defect {0:e})")]
    NotOdd(f64),
    #[error("operand must be homogeneous (even or odd)")]
    NotHomogeneous,
    #[error("operand must be even")]
    NotEven,
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("generator sets differ: {0}")]
    GeneratorMismatch(String),
    #[error("pair has no designated corner projection")]
    MissingCorner,
}
