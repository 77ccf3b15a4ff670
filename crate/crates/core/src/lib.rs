//! Sparse superposition codes on the additive white Gaussian noise channel:
//! large-deviation exponents, error-probability bounds, section-size-rate
//! analysis, a desk-scale exhaustive least-squares codec with a Reed-Solomon
//! outer code, dictionary diagnostics, and a seeded Monte Carlo harness.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod codec;
pub mod diagnostics;
pub mod error;
pub mod exponent;
pub mod harness;
pub mod normal;
mod numeric;
pub mod outer;
pub mod par;
pub mod rate;
pub mod stats;

pub use error::{Error, Result};
pub use par::Execution;
