//! Bound-state quantization from Hamilton's canonical equations with a
//! quantum potential and the stationary continuity condition.
//!
//! The crate solves the amplitude equations that follow from requiring the
//! momentum field of a bound stationary state to vanish, then checks the
//! resulting constants of motion against operator ratios, continuity
//! decompositions and the canonical flow itself.

// `!(a < b)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod central;
pub mod diagnostics;
pub mod dynamics;
pub mod eigensolver;
pub mod error;
pub mod fd;
pub mod model;
pub mod numerov;
pub mod quantum_potential;

pub use error::{Error, Result};
