//! Exponential operator splittings and their error analysis on dense
//! complex matrix pairs.
//!
//! The crate builds the Lie–Trotter, palindromic Lie–Trotter and Strang
//! propagators for a pair `(A, B)`, evaluates the exact nested-integral
//! representations of their errors by Gauss–Legendre quadrature, and
//! compares measured errors with logarithmic-norm bounds. See the
//! `examples/` directory of this crate for one runnable program per
//! capability.

// `!(x >= y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod error_forms;
pub mod experiment;
pub mod matcore;
pub mod order_lab;
pub mod problems;
pub mod quadrature;
pub mod splittings;

pub use error::{Error, Result};
pub use matcore::{CMat, C64};
pub use splittings::{Method, OperatorPair};
