//! Exact arithmetic for integral quadratic lattices.
//!
//! A [`Lattice`] is a free ℤ-module with a nondegenerate symmetric integer
//! Gram matrix. On top of it the crate provides discriminant groups with
//! their torsion quadratic forms, primitive sublattices and gluing,
//! overlattices, genus comparison, isometry extension across a glue, and
//! the arithmetic of primitive vectors in the root lattice A₂.
//!
//! Nothing in here uses floating point.

pub mod a2;
pub mod catalog;
pub mod discform;
pub mod embed;
pub mod extend;
pub mod isometry;
pub mod json;
pub mod lattice;
pub mod matrix;
pub mod random;
pub mod snf;
pub mod torsion;

pub use catalog::catalog;
pub use discform::{Decision, SearchCap};
pub use embed::{GlueData, PrimitiveSublattice};
pub use isometry::Isometry;
pub use lattice::{Lattice, Parity, Signature};
pub use matrix::{IntMatrix, RatMatrix};
pub use torsion::TorsionQuadraticForm;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is not square")]
    NotSquare,
    #[error("Gram matrix is degenerate (determinant 0)")]
    Degenerate,
    #[error("rescaling by {0} does not give an integral Gram matrix")]
    NonIntegralRescale(String),
    #[error("rescaling factor must be nonzero")]
    ZeroScale,
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("unknown lattice name `{0}`")]
    UnknownName(String),
    #[error("span is zero")]
    ZeroSpan,
    #[error("orthogonal complement is degenerate")]
    DegenerateComplement,
    #[error("glue vectors generate a non-integral form: {0}")]
    NonIntegralGlue(String),
    #[error("glue subgroup is not isotropic: {0}")]
    NotIsotropic(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("not primitive: {0}")]
    NotPrimitive(String),
    #[error("lattice is not definite")]
    NotDefinite,
    #[error("search exceeds the enumeration cap of {0}")]
    TooLarge(u64),
    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
    #[error("malformed JSON input: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
