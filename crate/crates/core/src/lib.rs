//! Strict polynomial functors over F_p: explicit realizations, Hom spaces,
//! Troesch p-complexes and Ext computations.

pub mod catalog;
pub mod combinat;
pub mod coresolve;
pub mod expr;
pub mod ext;
pub mod graded;
pub mod hom;
pub mod lifting;
pub mod natmap;
pub mod pcomplex;
pub mod realize;
pub mod schur;
pub mod selftest;

pub use polyext_linalg as linalg;

/// Engine version; part of every cache key.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

use polyext_linalg::LinalgError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("not liftable: {0}")]
    NotLiftable(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
