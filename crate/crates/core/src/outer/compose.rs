//! Outer Reed-Solomon code feeding the section labels of an unsigned
//! superposition code: with `B = 2^m` and `n_out = L`, codeword symbol `i`
//! is the index sent in section `i`.

use super::gf::Symbol;
use super::reed_solomon::{rs_decode, rs_encode, RSSpec, RsDecodeOutcome};
use crate::codec::SparseCoefficients;
use crate::error::{Error, Result};
use crate::rate::CodeSpec;

fn check_pair(code: &CodeSpec, rs: &RSSpec) -> Result<()> {
    if code.signed {
        return Err(Error::Config("composition needs an unsigned inner code".into()));
    }
    if code.section_size != rs.field().size() {
        return Err(Error::Config(format!(
            "section size {} must equal the field size 2^{} = {}",
            code.section_size,
            rs.field().m(),
            rs.field().size()
        )));
    }
    if rs.n_out() != code.sections {
        return Err(Error::Config(format!(
            "outer length {} must equal the number of sections {} (at most q - 1 = {})",
            rs.n_out(),
            code.sections,
            rs.field().size() - 1
        )));
    }
    Ok(())
}

/// Bits carried per composite codeword, `K_out m`.
pub fn composite_message_bits(rs: &RSSpec) -> usize {
    rs.k_out() * rs.field().m() as usize
}

/// Groups bits into big-endian `m`-bit symbols.
pub fn bits_to_symbols(bits: &[bool], m: u32) -> Vec<Symbol> {
    bits.chunks(m as usize)
        .map(|c| c.iter().fold(0, |acc: Symbol, &b| (acc << 1) | Symbol::from(b)))
        .collect()
}

pub fn symbols_to_bits(symbols: &[Symbol], m: u32) -> Vec<bool> {
    symbols
        .iter()
        .flat_map(|&s| (0..m).rev().map(move |k| (s >> k) & 1 == 1))
        .collect()
}

pub fn compose_encode(bits: &[bool], code: &CodeSpec, rs: &RSSpec) -> Result<SparseCoefficients> {
    check_pair(code, rs)?;
    let need = composite_message_bits(rs);
    if bits.len() != need {
        return Err(Error::Domain(format!("expected {need} message bits, got {}", bits.len())));
    }
    let symbols = bits_to_symbols(bits, rs.field().m());
    let codeword = rs_encode(&symbols, rs)?;
    Ok(SparseCoefficients::unsigned(codeword.into_iter().map(usize::from).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposeDecoded {
    pub bits: Vec<bool>,
    /// Outer decoding succeeded.
    pub block_ok: bool,
    pub corrected: usize,
}

/// On outer failure the systematic part of the received labels is returned
/// with `block_ok = false`.
pub fn compose_decode(decoded_sections: &SparseCoefficients, code: &CodeSpec, rs: &RSSpec) -> Result<ComposeDecoded> {
    check_pair(code, rs)?;
    if decoded_sections.sections() != code.sections {
        return Err(Error::Domain(format!(
            "expected {} sections, got {}",
            code.sections,
            decoded_sections.sections()
        )));
    }
    let received: Vec<Symbol> = decoded_sections.indices.iter().map(|&j| j as Symbol).collect();
    let m = rs.field().m();
    Ok(match rs_decode(&received, rs)? {
        RsDecodeOutcome::Decoded { message, corrected } => ComposeDecoded {
            bits: symbols_to_bits(&message, m),
            block_ok: true,
            corrected,
        },
        RsDecodeOutcome::Failure => ComposeDecoded {
            bits: symbols_to_bits(&received[..rs.k_out()], m),
            block_ok: false,
            corrected: 0,
        },
    })
}

/// Outer rate `K_out / L`.
pub fn outer_rate(rs: &RSSpec) -> f64 {
    rs.rate()
}

/// `R_inner K_out / L`.
pub fn composite_rate(inner_rate: f64, rs: &RSSpec) -> f64 {
    inner_rate * rs.rate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> (CodeSpec, RSSpec) {
        let code = CodeSpec::new(10, 16, false, 1.0).unwrap();
        (code, RSSpec::for_sections(4, 10, 2).unwrap())
    }

    #[test]
    fn bit_symbol_round_trip() {
        let bits = vec![true, false, true, true, false, false, false, true];
        let s = bits_to_symbols(&bits, 4);
        assert_eq!(s, vec![0b1011, 0b0001]);
        assert_eq!(symbols_to_bits(&s, 4), bits);
    }

    #[test]
    fn clean_and_injected_mistakes() {
        let (code, rs) = pair();
        let bits: Vec<bool> = (0..24).map(|i| i % 3 == 0).collect();
        let beta = compose_encode(&bits, &code, &rs).unwrap();
        let clean = compose_decode(&beta, &code, &rs).unwrap();
        assert!(clean.block_ok);
        assert_eq!(clean.bits, bits);
        for a in 0..10 {
            for b in (a + 1)..10 {
                let mut bad = beta.clone();
                bad.indices[a] ^= 5;
                bad.indices[b] ^= 12;
                let out = compose_decode(&bad, &code, &rs).unwrap();
                assert!(out.block_ok);
                assert_eq!(out.bits, bits);
                assert_eq!(out.corrected, 2);
            }
        }
    }

    #[test]
    fn rate_accounting() {
        let (_, rs) = pair();
        let delta = rs.distance() as f64 / 10.0;
        assert!((outer_rate(&rs) - (1.0 - delta + 0.1)).abs() < 1e-15);
        assert!(composite_rate(2.0, &rs) >= (1.0 - delta) * 2.0);
    }

    #[test]
    fn configuration_errors() {
        let (code, rs) = pair();
        let signed = CodeSpec::new(10, 16, true, 1.0).unwrap();
        assert!(matches!(compose_encode(&[false; 24], &signed, &rs), Err(Error::Config(_))));
        let wrong_b = CodeSpec::new(10, 32, false, 1.0).unwrap();
        assert!(matches!(compose_encode(&[false; 24], &wrong_b, &rs), Err(Error::Config(_))));
        let wrong_l = CodeSpec::new(12, 16, false, 1.0).unwrap();
        assert!(matches!(compose_encode(&[false; 24], &wrong_l, &rs), Err(Error::Config(_))));
        assert!(compose_encode(&[false; 23], &code, &rs).is_err());
    }
}
