//! Exact linear algebra over ℚ on free vector spaces whose bases are
//! canonical combinatorial labels.

mod formal;
mod matrix;
mod rational;

use core::fmt;

pub use formal::{support, FormalSum};
pub use matrix::{echelonize, kernel, rank, reduce_mod, SparseMatrix, Subspace};
pub use rational::Rational;

/// A basis label: totally ordered (the order is the column order) and
/// printable in its canonical text encoding.
pub trait Label: Ord + Clone + fmt::Display {}

impl<T: Ord + Clone + fmt::Display> Label for T {}

