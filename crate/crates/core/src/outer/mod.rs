//! Reed-Solomon outer code and its composition with the inner code.

pub mod compose;
pub mod gf;
pub mod reed_solomon;

pub use compose::{compose_decode, compose_encode, composite_rate, outer_rate, ComposeDecoded};
pub use gf::{Field, Symbol};
pub use reed_solomon::{rs_decode, rs_encode, RSSpec, RsDecodeOutcome};
