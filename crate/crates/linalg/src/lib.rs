//! Exact linear algebra over small prime fields.
//!
//! Dense matrices store one byte per entry; over F_2 row reduction runs on
//! word-packed rows. Subspaces are always kept in canonical reduced echelon
//! form, so equal subspaces compare equal bytewise.

mod bits;
mod field;
mod incremental;
mod matrix;
mod sparse;
mod subspace;

pub use bits::BitMatrix;
pub use field::{is_prime, PrimeField};
pub use incremental::{ConstraintRefiner, IncrementalSolver, RefineStats};
pub use matrix::{rref, solve, Echelon, Matrix};
pub use sparse::SparseMatrix;
pub use subspace::{kernel, Subspace};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{0} is not a supported prime (need a prime in 2..=251)")]
    NotPrime(u32),
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("shape error: {0}")]
    Shape(String),
}
