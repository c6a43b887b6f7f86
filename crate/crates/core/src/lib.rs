//! Computational tools for extremal sets in Euclidean and (truncated) Hilbert space.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod error;
pub mod geometry;

pub use error::{Error, Result};
pub mod cli;
pub mod generators;
pub mod jung;
pub mod mnc;
pub mod simplex;
