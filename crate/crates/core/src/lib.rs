//! Monte Carlo laboratory for the nodal set of Berry's planar random wave.
//!
//! The pipeline samples the random wave on a square ([`randomwave`]), traces
//! its zero set ([`nodal`]), evaluates the fourth-order chaos functionals
//! ([`chaos`]) and aggregates ensembles ([`harness`]). [`oracle`] evaluates the
//! same second moments deterministically as a cross-check.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos;
pub mod error;
pub mod harness;
pub mod nodal;
pub mod oracle;
pub mod randomwave;
pub mod rng;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
