//! Dictionary generation, encoding, the channel, and exhaustive decoding.

pub mod coefficients;
pub mod decode;
pub mod dictionary;
pub mod rng;

pub use coefficients::{
    awgn_channel, count_mistakes, decode_bits, encode, inner, norm_sq, random_coefficients, residual_sq,
    synthesize, test_statistic, SparseCoefficients,
};
pub use decode::{decode_exhaustive, decode_exhaustive_with, DecodeOptions, DecodeResult, DEFAULT_ENUMERATION_CAP};
pub use dictionary::{generate_dictionary, generate_dictionary_with_power, Dictionary};
