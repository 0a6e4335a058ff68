//! Exact operator models for the quantum SU(2) and Podles sphere spectral
//! triples.
//!
//! The crate stays exact wherever the mathematics is exact: algebra elements
//! have big-rational coefficients, representation matrices live in explicit
//! square-root extensions, and index computations reduce to integer ranks.
//! Floating point appears only in norm estimates for compactness and decay
//! certificates, always with stated tolerances.
//!
//! Layout:
//! - [`scalar`]: the exact scalar tower (`Rat`, `GaussRat`, `Quad`,
//!   square-root extensions) behind a small [`scalar::Scalar`] trait.
//! - [`sparse`]: sparse matrices, exact and floating rank, operator norms.
//! - [`truncation`]: finite windows of infinite operators with margin
//!   bookkeeping and text serialization.

#![forbid(unsafe_code)]

pub mod algebra;
pub mod connes;
pub mod dirac;
pub mod fredholm;
pub mod l2;
pub mod podles;
pub mod represent;
pub mod scalar;
pub mod sparse;
pub mod truncation;

pub use scalar::{FieldScalar, GaussRat, Quad, Rat, Scalar, SqrtQuad, SqrtRat};
pub use sparse::SparseMat;
pub use truncation::{
    EvenOp, HalfLineOp, PlaneWindow, TruncatedOperator, TruncationError, Windowed, ZLineOp,
};
