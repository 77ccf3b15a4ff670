//! Exhaustive least-squares decoding.
//!
//! Candidates are visited depth first in lexicographic order of their
//! per-section symbols (see [`SparseCoefficients::symbols`]), with the
//! residual expanded through `Y . X_j` and the Gram matrix so each step costs
//! `O(depth)`. Work is split on the first section's symbol; the reduction
//! keeps the strict minimum and, on ties, the lexicographically first
//! candidate, so the answer does not depend on scheduling.

use super::coefficients::{count_mistakes, residual_sq, SparseCoefficients};
use super::dictionary::Dictionary;
use crate::error::{domain, Error, Result};
use crate::par::Execution;
use crate::rate::CodeSpec;

/// Default bound on the number of enumerated candidates.
pub const DEFAULT_ENUMERATION_CAP: u64 = 20_000_000;

/// Gram matrices above this many entries are replaced by on-the-fly dot products.
const GRAM_TABLE_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeOptions {
    pub delta0: f64,
    pub cap: u64,
    /// Normalized residual to accept within `delta0` of. When set, the first
    /// candidate (in enumeration order) with residual at most
    /// `reference + delta0` is returned instead of the global minimiser.
    pub early_exit_reference: Option<f64>,
    pub exec: Execution,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        Self {
            delta0: 0.0,
            cap: DEFAULT_ENUMERATION_CAP,
            early_exit_reference: None,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub coefficients: SparseCoefficients,
    /// Normalized `|Y - X beta_hat|^2`.
    pub residual_sq: f64,
    pub delta0_used: f64,
    /// Whether the result came from the tolerance-based early exit.
    pub early_exit: bool,
    pub mistakes: Option<usize>,
}

impl DecodeResult {
    /// Records the mistake count against the transmitted coefficients.
    pub fn score(&mut self, truth: &SparseCoefficients) -> Result<usize> {
        let m = count_mistakes(&self.coefficients, truth)?;
        self.mistakes = Some(m);
        Ok(m)
    }
}

/// Number of candidates, `B^L` or `(2B)^L`, as a float to avoid overflow.
pub fn candidate_count(code: &CodeSpec) -> f64 {
    let per = code.section_size as f64 * if code.signed { 2.0 } else { 1.0 };
    per.powi(code.sections as i32)
}

/// Global least-squares minimiser over all codewords.
pub fn decode_exhaustive(dict: &Dictionary, y: &[f64], code: &CodeSpec, delta0: f64) -> Result<DecodeResult> {
    decode_exhaustive_with(
        dict,
        y,
        code,
        &DecodeOptions {
            delta0,
            ..DecodeOptions::default()
        },
    )
}

pub fn decode_exhaustive_with(dict: &Dictionary, y: &[f64], code: &CodeSpec, opts: &DecodeOptions) -> Result<DecodeResult> {
    if dict.sections() != code.sections || dict.section_size() != code.section_size {
        return domain("dictionary layout does not match the code");
    }
    if y.len() != dict.rows() {
        return domain(format!("received vector has length {}, dictionary has {} rows", y.len(), dict.rows()));
    }
    if !(opts.delta0 >= 0.0) {
        return domain(format!("delta0 must be nonnegative, got {}", opts.delta0));
    }
    let candidates = candidate_count(code);
    if candidates > opts.cap as f64 {
        return Err(Error::EnumerationCap {
            candidates,
            cap: opts.cap,
        });
    }
    let search = Search::new(dict, y, code.signed);
    let threshold = opts
        .early_exit_reference
        .map(|r| y.len() as f64 * (r + opts.delta0) - search.y_sq);
    let partials = opts.exec.map_range(search.symbols_per_section, |first| search.run(first, threshold));
    let best = match threshold {
        // first partition holding an acceptable candidate
        Some(_) => partials.iter().flatten().find(|b| b.hit).cloned(),
        None => None,
    };
    let (best, early_exit) = match best {
        Some(b) => (b, true),
        None => {
            let b = partials
                .into_iter()
                .flatten()
                .fold(None::<Best>, |acc, b| match acc {
                    Some(a) if a.value <= b.value => Some(a),
                    _ => Some(b),
                })
                .expect("at least one candidate");
            (b, false)
        }
    };
    let coefficients = SparseCoefficients::from_symbols(&best.symbols, code.signed);
    let residual = residual_sq(dict, y, &coefficients)?;
    Ok(DecodeResult {
        coefficients,
        residual_sq: residual,
        delta0_used: opts.delta0,
        early_exit,
        mistakes: None,
    })
}

#[derive(Debug, Clone)]
struct Best {
    value: f64,
    symbols: Vec<usize>,
    hit: bool,
}

struct Search<'a> {
    dict: &'a Dictionary,
    sections: usize,
    section_size: usize,
    signed: bool,
    symbols_per_section: usize,
    y_sq: f64,
    yx: Vec<f64>,
    diag: Vec<f64>,
    gram: Option<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<'a> Search<'a> {
    fn new(dict: &'a Dictionary, y: &[f64], signed: bool) -> Self {
        let n_cols = dict.columns();
        let yx = (0..n_cols).map(|j| dot(y, dict.column(j))).collect();
        let diag = (0..n_cols).map(|j| dot(dict.column(j), dict.column(j))).collect();
        let gram = (n_cols * n_cols <= GRAM_TABLE_LIMIT).then(|| {
            let mut g = vec![0.0; n_cols * n_cols];
            for a in 0..n_cols {
                for b in a..n_cols {
                    let v = dot(dict.column(a), dict.column(b));
                    g[a * n_cols + b] = v;
                    g[b * n_cols + a] = v;
                }
            }
            g
        });
        Self {
            dict,
            sections: dict.sections(),
            section_size: dict.section_size(),
            signed,
            symbols_per_section: dict.section_size() * if signed { 2 } else { 1 },
            y_sq: dot(y, y),
            yx,
            diag,
            gram,
        }
    }

    fn cross(&self, a: usize, b: usize) -> f64 {
        match &self.gram {
            Some(g) => g[a * self.dict.columns() + b],
            None => dot(self.dict.column(a), self.dict.column(b)),
        }
    }

    fn column_and_sign(&self, depth: usize, symbol: usize) -> (usize, f64) {
        let (index, sign) = if self.signed {
            (symbol / 2, if symbol % 2 == 1 { -1.0 } else { 1.0 })
        } else {
            (symbol, 1.0)
        };
        (depth * self.section_size + index, sign)
    }

    /// Searches the subtree with first-section symbol `first`.
    fn run(&self, first: usize, threshold: Option<f64>) -> Option<Best> {
        let l = self.sections;
        let mut symbols = vec![0usize; l];
        let mut cols = vec![0usize; l];
        let mut signs = vec![0f64; l];
        let mut partial = vec![0f64; l + 1];
        let mut best: Option<Best> = None;
        symbols[0] = first;
        let mut depth = 0usize;
        loop {
            let (col, sign) = self.column_and_sign(depth, symbols[depth]);
            let mut coupling = 0.0;
            for e in 0..depth {
                coupling += signs[e] * self.cross(cols[e], col);
            }
            cols[depth] = col;
            signs[depth] = sign;
            partial[depth + 1] = partial[depth] - 2.0 * sign * self.yx[col] + self.diag[col] + 2.0 * sign * coupling;
            if depth + 1 == l {
                let value = partial[l];
                if let Some(t) = threshold {
                    if value <= t {
                        return Some(Best {
                            value,
                            symbols,
                            hit: true,
                        });
                    }
                }
                if best.as_ref().is_none_or(|b| value < b.value) {
                    best = Some(Best {
                        value,
                        symbols: symbols.clone(),
                        hit: false,
                    });
                }
                // advance to the next leaf, backtracking as needed
                loop {
                    symbols[depth] += 1;
                    if symbols[depth] < self.symbols_per_section && depth > 0 {
                        break;
                    }
                    if depth == 0 {
                        return best;
                    }
                    symbols[depth] = 0;
                    depth -= 1;
                }
            } else {
                depth += 1;
                symbols[depth] = 0;
            }
        }
    }
}
