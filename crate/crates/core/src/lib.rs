//! Semidefinite lower bounds on the nonnegative rank of entrywise-nonnegative
//! matrices, with verifiable dual certificates.
//!
//! The bound is `rank_+(A) >= (nu_+(A) / ||A||_F)^2`, where `nu_+` is the
//! nonnegative nuclear norm, a copositive program. Replacing the copositive
//! cone by inner approximations (nonnegative-plus-PSD at level 0, and
//! sum-of-squares cones at higher levels) gives semidefinite programs whose
//! values are still valid lower bounds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod generators;
pub mod io;
pub mod matrix;
pub mod relaxations;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{frobenius_norm, weighted_gram_trace, DenseMatrix, NonnegMatrix, SymWeight};
