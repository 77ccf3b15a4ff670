//! Systematic Reed-Solomon codes of length `n_out <= q - 1`.
//!
//! A codeword is `[message | parity]` read as polynomial coefficients from
//! the highest degree down, with generator `prod_{i=1}^{d-1} (x - alpha^i)`.
//! Length `q - 1 - w` is the base code shortened by `w`: prepending `w`
//! zero message symbols to a base-code message and dropping them from the
//! codeword gives the same symbols. Decoding is syndromes, Berlekamp-Massey,
//! Chien search and Forney's formula. For `m = 8` a symbol fits one byte.

use super::gf::{Field, Symbol};
use crate::error::{domain, Result};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RSSpec {
    field: Arc<Field>,
    n_out: usize,
    k_out: usize,
    /// Generator coefficients, highest degree first, monic.
    generator: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RsDecodeOutcome {
    Decoded { message: Vec<Symbol>, corrected: usize },
    Failure,
}

impl RSSpec {
    pub fn new(m: u32, n_out: usize, k_out: usize) -> Result<Self> {
        Self::with_field(Arc::new(Field::new(m)?), n_out, k_out)
    }

    pub fn with_field(field: Arc<Field>, n_out: usize, k_out: usize) -> Result<Self> {
        let base = field.size() - 1;
        if n_out == 0 || n_out > base {
            return domain(format!("codeword length must lie in 1..={base}, got {n_out}"));
        }
        if k_out == 0 || k_out > n_out {
            return domain(format!("message length must lie in 1..={n_out}, got {k_out}"));
        }
        let mut generator: Vec<Symbol> = vec![1];
        for i in 1..=(n_out - k_out) {
            let root = field.alpha_pow(i as i64);
            let mut next = vec![0; generator.len() + 1];
            for (k, &g) in generator.iter().enumerate() {
                next[k] ^= g;
                next[k + 1] ^= field.mul(g, root);
            }
            generator = next;
        }
        Ok(Self {
            field,
            n_out,
            k_out,
            generator,
        })
    }

    /// Code of length `L` correcting `ell0` symbol errors (`d = 2 ell0 + 1`).
    pub fn for_sections(m: u32, sections: usize, ell0: usize) -> Result<Self> {
        if 2 * ell0 >= sections {
            return domain(format!("cannot correct {ell0} errors in length {sections}"));
        }
        Self::new(m, sections, sections - 2 * ell0)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn k_out(&self) -> usize {
        self.k_out
    }

    pub fn distance(&self) -> usize {
        self.n_out - self.k_out + 1
    }

    pub fn correctable(&self) -> usize {
        (self.distance() - 1) / 2
    }

    /// Shortening `w` relative to the length `q - 1` base code.
    pub fn shortening(&self) -> usize {
        self.field.size() - 1 - self.n_out
    }

    /// `K_out / n_out`.
    pub fn rate(&self) -> f64 {
        self.k_out as f64 / self.n_out as f64
    }

    fn check_symbols(&self, symbols: &[Symbol], len: usize, what: &str) -> Result<()> {
        if symbols.len() != len {
            return domain(format!("{what} must have {len} symbols, got {}", symbols.len()));
        }
        if let Some(bad) = symbols.iter().find(|&&s| !self.field.contains(s)) {
            return domain(format!("symbol {bad} is outside GF(2^{})", self.field.m()));
        }
        Ok(())
    }
}

pub fn rs_encode(message: &[Symbol], spec: &RSSpec) -> Result<Vec<Symbol>> {
    spec.check_symbols(message, spec.k_out, "message")?;
    let f = spec.field();
    let parity_len = spec.n_out - spec.k_out;
    // remainder of message(x) x^{n-k} divided by the generator
    let mut work: Vec<Symbol> = message.to_vec();
    work.resize(spec.n_out, 0);
    for i in 0..spec.k_out {
        let coef = work[i];
        if coef != 0 {
            for (k, &g) in spec.generator.iter().enumerate().skip(1) {
                work[i + k] ^= f.mul(g, coef);
            }
        }
    }
    let mut codeword = message.to_vec();
    codeword.extend_from_slice(&work[spec.k_out..spec.k_out + parity_len]);
    Ok(codeword)
}

/// Bounded-distance decoding: corrects up to `t = floor((d - 1) / 2)` symbol errors.
pub fn rs_decode(received: &[Symbol], spec: &RSSpec) -> Result<RsDecodeOutcome> {
    spec.check_symbols(received, spec.n_out, "received word")?;
    let f = spec.field();
    let n = spec.n_out;
    let two_t = spec.n_out - spec.k_out;
    let syndromes: Vec<Symbol> = (1..=two_t)
        .map(|i| f.eval_high_first(received, f.alpha_pow(i as i64)))
        .collect();
    if syndromes.iter().all(|&s| s == 0) {
        return Ok(RsDecodeOutcome::Decoded {
            message: received[..spec.k_out].to_vec(),
            corrected: 0,
        });
    }
    let locator = berlekamp_massey(f, &syndromes);
    let errors = locator.len() - 1;
    if errors == 0 || errors > spec.correctable() {
        return Ok(RsDecodeOutcome::Failure);
    }
    // Chien search over positions; position p has degree n - 1 - p
    let mut positions = Vec::with_capacity(errors);
    for p in 0..n {
        let degree = (n - 1 - p) as i64;
        if f.eval_low_first(&locator, f.alpha_pow(-degree)) == 0 {
            positions.push(p);
        }
    }
    if positions.len() != errors {
        return Ok(RsDecodeOutcome::Failure);
    }
    // Omega = S(x) Lambda(x) mod x^{2t}
    let mut omega = vec![0; two_t];
    for (i, &s) in syndromes.iter().enumerate() {
        for (j, &l) in locator.iter().enumerate() {
            if i + j < two_t {
                omega[i + j] ^= f.mul(s, l);
            }
        }
    }
    // formal derivative keeps odd-degree terms
    let derivative: Vec<Symbol> = locator
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| if k % 2 == 1 { c } else { 0 })
        .collect();
    let mut corrected = received.to_vec();
    for &p in &positions {
        let x_inv = f.alpha_pow(-((n - 1 - p) as i64));
        let denom = f.eval_low_first(&derivative, x_inv);
        if denom == 0 {
            return Ok(RsDecodeOutcome::Failure);
        }
        let magnitude = f.div(f.eval_low_first(&omega, x_inv), denom)?;
        corrected[p] ^= magnitude;
    }
    let clean = (1..=two_t).all(|i| f.eval_high_first(&corrected, f.alpha_pow(i as i64)) == 0);
    if !clean {
        return Ok(RsDecodeOutcome::Failure);
    }
    Ok(RsDecodeOutcome::Decoded {
        message: corrected[..spec.k_out].to_vec(),
        corrected: errors,
    })
}

/// Error locator, lowest degree first, trimmed of trailing zeros.
fn berlekamp_massey(f: &Field, syndromes: &[Symbol]) -> Vec<Symbol> {
    let mut c: Vec<Symbol> = vec![1];
    let mut b: Vec<Symbol> = vec![1];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last_disc: Symbol = 1;
    for k in 0..syndromes.len() {
        let mut d = syndromes[k];
        for i in 1..=len.min(c.len() - 1) {
            d ^= f.mul(c[i], syndromes[k - i]);
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        let coef = f.div(d, last_disc).expect("nonzero discrepancy");
        let previous = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + shift] ^= f.mul(coef, bi);
        }
        if 2 * len <= k {
            len = k + 1 - len;
            b = previous;
            last_disc = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.truncate(len + 1);
    while c.len() > 1 && *c.last().unwrap() == 0 {
        c.pop();
    }
    c
}

/// Number of positions where two words differ.
pub fn hamming_distance(a: &[Symbol], b: &[Symbol]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len())
}
