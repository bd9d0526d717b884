#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Alternating random walks on an ellipse, the rough-disk-in-strip billiard
//! they describe, and the wall microstructures that generate their kernels.

pub mod altwalk;
pub mod analysis;
pub mod diskstrip;
mod error;
pub mod kernels1d;
pub mod microstructure;
pub mod parallel;
pub mod suite;
pub mod tolerances;

pub use error::{Error, Result};
