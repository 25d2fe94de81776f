//! Translation-invariant local functionals on convex polytopes, their
//! translative integral formulas, inclusion-exclusion extensions to unions in
//! general position, and Boolean-model simulation.

// `!(x >= 0.0)` is used deliberately to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod functionals;
pub mod geom;
pub mod gp_union;
pub mod report;
pub mod rotation;
pub mod spherical;
pub mod stochastic;

pub use error::{Error, Result};
