//! Exact DG algebra engine for one-dimensional Koszul duality.
//!
//! Everything is generic over [`Scalar`]; [`Rational`] and the `F*` prime
//! field aliases are the concrete fields.

pub mod algebra;
pub mod bar;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod graded;
pub mod harness;
pub mod hochschild;
pub mod io;
pub mod lie;
pub mod linalg;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{FieldSpec, Fp, Scalar, F101, F11, F13, F2, F2147483647, F3, F32003, F5, F65521, F7};

/// Rational numbers with arbitrary precision.
pub type Rational = scalar::Rational;
