//! Numerical multilinear algebra for 3-tensors: hypermatrix arithmetic,
//! spectral search, hardness-reduction gadgets, the 2x2x2 hyperdeterminant
//! and rank evidence tooling.

pub mod cli;
pub mod error;
pub mod gadgets;
pub mod hyperdet;
pub mod hypermatrix;
pub mod lm;
pub mod rank;
pub mod scalar;
pub mod search;
pub mod spectral;

pub use error::{Error, Result};
pub use hypermatrix::{Matrix, Tensor3};
pub use scalar::{Rational, Scalar, ScalarKind};
pub use search::SearchConfig;
