//! Finite-dimensional toolkit for finding a common point of the solution set
//! of a monotone equilibrium problem and the fixed-point set of a
//! generalized hybrid mapping, via a modified Ishikawa iteration whose inner
//! step is the equilibrium resolvent `T_r`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod equilibrium;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod mappings;
pub mod schemes;

pub use error::{Error, Result};
pub use hilbert::{ConvexSet, Tolerance, Vector};
