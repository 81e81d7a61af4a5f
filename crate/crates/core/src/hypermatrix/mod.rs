//! Dense 3-tensors and their multilinear algebra.

pub mod io;
mod matrix;
mod tensor;

pub use matrix::Matrix;
pub use tensor::{Contraction, Slot, Tensor3};
