use alloc::string::String;

/// Errors raised by the algebraic core.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("genus mismatch: {left} vs {right}")]
    GenusMismatch { left: u32, right: u32 },
    #[error("invalid genus {0} (supported range is 1..=32)")]
    InvalidGenus(u32),
    #[error("handle index {index} out of range for genus {genus}")]
    Handle { index: usize, genus: u32 },
    #[error("invalid spine: x·y = {0} (must be 1)")]
    Spine(u8),
    #[error("not a symplectic basis: {0}")]
    Basis(String),
    #[error("matrix is not symplectic: {0}")]
    Matrix(String),
    #[error("degree {degree} exceeds the filtration bound {bound}")]
    Filtration { degree: u32, bound: u32 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("geometry check failed: {0}")]
    Geometry(String),
    #[error("disjointness certificate rejected: {0}")]
    Disjointness(String),
    #[error("linking matrix violates L^T - L = J at ({row}, {col}): expected {expected}, found {found}")]
    Consistency {
        row: usize,
        col: usize,
        expected: i64,
        found: i64,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
