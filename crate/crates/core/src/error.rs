use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not square (row {row} has {len} entries, expected {expected})")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("Gram matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("lattice is not even: diagonal entry {index} is {value}")]
    NotEven { index: usize, value: BigInt },
    #[error("Gram matrix is degenerate (determinant 0)")]
    Degenerate,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected signature {expected}, found ({plus}, {minus})")]
    WrongSignature { expected: String, plus: usize, minus: usize },
    #[error("expected rank {expected}, found {found}")]
    WrongRank { expected: String, found: usize },
    #[error("invalid finite quadratic form: {0}")]
    InvalidForm(String),
    #[error("{prime}-part has {generators} invariant factors; only rank <= 2 sources are classified")]
    Unclassifiable { prime: BigInt, generators: usize },
    #[error("discriminant form admits no anti-automorphism")]
    NoAntiAutomorphism,
    #[error("group order {order} exceeds the enumeration cap {cap}")]
    CapExceeded { order: BigInt, cap: u64 },
    #[error("no witness found with coordinates bounded by {bound}")]
    SearchExhausted { bound: u64 },
    #[error("invalid complexified Kahler class: {0}")]
    InvalidKahlerClass(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
