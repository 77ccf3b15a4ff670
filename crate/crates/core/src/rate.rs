//! Channel and code parameter arithmetic and the section-size analysis.
//!
//! Rates and capacities are in nats per channel use. Mistake fractions are
//! handled as integer counts `ell` out of `L` sections; [`ell_from_alpha`]
//! converts a fraction when it is an exact multiple of `1/L`.

use crate::error::{domain, Result};
use crate::exponent::{d1_raw, inverse_g, lambda_star_raw};
use crate::numeric::{bisect_increasing, upper_bracket};
use crate::par::Execution;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    /// Signal power `P`.
    pub power: f64,
    /// Noise variance `sigma^2`.
    pub noise_var: f64,
}

impl ChannelSpec {
    pub fn new(power: f64, noise_var: f64) -> Result<Self> {
        if !(power > 0.0) || !(noise_var > 0.0) || !power.is_finite() || !noise_var.is_finite() {
            return domain(format!(
                "channel needs positive finite power and noise variance, got P={power}, sigma2={noise_var}"
            ));
        }
        Ok(Self { power, noise_var })
    }

    /// Unit noise variance with `P = v`.
    pub fn from_snr(v: f64) -> Result<Self> {
        Self::new(v, 1.0)
    }

    pub fn snr(&self) -> f64 {
        self.power / self.noise_var
    }

    pub fn capacity(&self) -> f64 {
        0.5 * self.snr().ln_1p()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    /// Number of sections `L`.
    pub sections: usize,
    /// Columns per section `B`.
    pub section_size: usize,
    pub signed: bool,
    /// Rate `R` in nats per channel use.
    pub rate: f64,
}

impl CodeSpec {
    pub fn new(sections: usize, section_size: usize, signed: bool, rate: f64) -> Result<Self> {
        if sections == 0 {
            return domain("a code needs at least one section");
        }
        if section_size < 2 {
            return domain(format!("section size must be at least 2, got {section_size}"));
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return domain(format!("rate must be positive, got {rate}"));
        }
        Ok(Self {
            sections,
            section_size,
            signed,
            rate,
        })
    }

    /// Code with the rate implied by a given codelength.
    pub fn from_codelength(sections: usize, section_size: usize, signed: bool, n: f64) -> Result<Self> {
        if !(n > 0.0) {
            return domain(format!("codelength must be positive, got {n}"));
        }
        let probe = Self::new(sections, section_size, signed, 1.0)?;
        Self::new(sections, section_size, signed, probe.log_codebook_size() / n)
    }

    /// `a = ln B / ln L` (infinite for a single section).
    pub fn section_size_rate(&self) -> f64 {
        (self.section_size as f64).ln() / (self.sections as f64).ln()
    }

    /// Natural log of the number of codewords: `L ln B`, or `L ln 2B` when signed.
    pub fn log_codebook_size(&self) -> f64 {
        let per_section = if self.signed {
            (2.0 * self.section_size as f64).ln()
        } else {
            (self.section_size as f64).ln()
        };
        self.sections as f64 * per_section
    }

    /// Analysis codelength `n = L ln B / R` (or `L ln 2B / R`).
    pub fn n_real(&self) -> f64 {
        self.log_codebook_size() / self.rate
    }

    /// Simulation codelength, `ceil(n_real)`.
    pub fn n_int(&self) -> usize {
        let n = self.n_real();
        // guard against n_real landing a hair above an integer through rounding
        let r = n.round();
        if (n - r).abs() <= 1e-9 * n.max(1.0) {
            r.max(1.0) as usize
        } else {
            n.ceil().max(1.0) as usize
        }
    }

    pub fn dictionary_size(&self) -> usize {
        self.sections * self.section_size
    }

    /// `log2 B` when `B` is a power of two.
    pub fn index_bits(&self) -> Option<u32> {
        self.section_size
            .is_power_of_two()
            .then(|| self.section_size.trailing_zeros())
    }

    /// Input bits per codeword, `L log2 B` or `L (1 + log2 B)`.
    pub fn input_bits(&self) -> Option<usize> {
        self.index_bits()
            .map(|b| self.sections * (b as usize + usize::from(self.signed)))
    }
}

/// Mistake fractions `ell / L` on a contiguous integer range.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    pub sections: usize,
    pub ells: Vec<usize>,
}

impl AlphaGrid {
    /// `ell = 1..=L`.
    pub fn full(sections: usize) -> Self {
        Self::range(sections, 1, sections)
    }

    /// `ell = from..=to`, clipped to `[0, L]`.
    pub fn range(sections: usize, from: usize, to: usize) -> Self {
        let to = to.min(sections);
        Self {
            sections,
            ells: (from..=to).collect(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.ells
            .iter()
            .map(|&l| l as f64 / self.sections as f64)
            .collect()
    }
}

/// Converts `alpha` to `ell = alpha L`, failing unless it is an integer.
pub fn ell_from_alpha(alpha: f64, sections: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [0, 1], got {alpha}"));
    }
    let x = alpha * sections as f64;
    let r = x.round();
    if (x - r).abs() > 1e-9 * (sections as f64).max(1.0) {
        return domain(format!("alpha L = {x} is not an integer"));
    }
    Ok(r as usize)
}

fn check_snr(v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return domain(format!("snr must be positive, got {v}"));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [0, 1], got {alpha}"));
    }
    Ok(())
}

/// `C = (1/2) ln(1 + v)`.
pub fn capacity(v: f64) -> Result<f64> {
    check_snr(v)?;
    Ok(0.5 * v.ln_1p())
}

/// `C_alpha = (1/2) ln(1 + alpha v)`.
pub fn partial_capacity(alpha: f64, v: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_snr(v)?;
    Ok(0.5 * (alpha * v).ln_1p())
}

/// `alpha v / (1 + alpha v)`, the correlation parameter of the first bound.
pub fn one_minus_rho_sq_lemma1(alpha: f64, v: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_snr(v)?;
    Ok(s_lemma1(alpha, v))
}

/// `alpha (1 - alpha) v / (1 + alpha v)`, the improved parameter of the two-term bound.
pub fn one_minus_rho_sq_lemma2(alpha: f64, v: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_snr(v)?;
    Ok(s_lemma2(alpha, v))
}

#[inline]
pub(crate) fn s_lemma1(alpha: f64, v: f64) -> f64 {
    alpha * v / (1.0 + alpha * v)
}

#[inline]
pub(crate) fn s_lemma2(alpha: f64, v: f64) -> f64 {
    alpha * (1.0 - alpha) * v / (1.0 + alpha * v)
}

#[inline]
pub(crate) fn tilde_delta_raw(alpha: f64, v: f64) -> f64 {
    (0.5 * (alpha * v).ln_1p() - alpha * 0.5 * v.ln_1p()).max(0.0)
}

/// `C_alpha - alpha C`: zero at the endpoints, positive and concave in between.
pub fn tilde_delta(alpha: f64, v: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_snr(v)?;
    Ok(tilde_delta_raw(alpha, v))
}

/// `ln binom(L, ell)`.
pub fn log_binomial(sections: usize, ell: usize) -> Result<f64> {
    if ell > sections {
        return domain(format!("ell = {ell} exceeds L = {sections}"));
    }
    Ok(log_binomial_raw(sections, ell))
}

#[inline]
pub(crate) fn log_binomial_raw(sections: usize, ell: usize) -> f64 {
    if ell == 0 || ell == sections {
        return 0.0;
    }
    let k = ell.min(sections - ell);
    statrs::function::factorial::ln_binomial(sections as u64, k as u64)
}

/// `r_alpha = (1/n) ln binom(L, ell)`.
pub fn r_alpha(ell: usize, sections: usize, n_real: f64) -> Result<f64> {
    if !(n_real > 0.0) {
        return domain(format!("codelength must be positive, got {n_real}"));
    }
    Ok(log_binomial(sections, ell)? / n_real)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaMin {
    /// Root of `n D1(delta, 1 - rho^2) = ln binom(L, ell)` found by bisection.
    pub value: f64,
    /// The same root from the branch formulas (`sqrt(s) G(r)` or `r - (1/2) ln rho^2`).
    pub closed_form: f64,
    /// Whether the root sits on the `lambda < 1` branch.
    pub interior: bool,
}

/// Minimal gap whose exponent cancels the combinatorial coefficient at `ell`.
pub fn delta_min(ell: usize, sections: usize, n_real: f64, v: f64) -> Result<DeltaMin> {
    check_snr(v)?;
    if ell == 0 || ell >= sections {
        return domain(format!("delta_min needs 1 <= ell <= L - 1, got ell = {ell}, L = {sections}"));
    }
    let r = r_alpha(ell, sections, n_real)?;
    let alpha = ell as f64 / sections as f64;
    Ok(delta_min_from_r(r, s_lemma2(alpha, v)))
}

pub(crate) fn delta_min_from_r(r: f64, s: f64) -> DeltaMin {
    if r <= 0.0 {
        return DeltaMin {
            value: 0.0,
            closed_form: 0.0,
            interior: true,
        };
    }
    let rho_sq = 1.0 - s;
    let g = inverse_g(r);
    let interior = g < s.sqrt() / rho_sq;
    let closed_form = if interior {
        s.sqrt() * g
    } else {
        r - 0.5 * rho_sq.ln()
    };
    let f = |d: f64| d1_raw(d, s);
    let hi = upper_bracket(f, r, 2.0 * closed_form + f64::MIN_POSITIVE);
    let value = bisect_increasing(f, r, 0.0, hi);
    DeltaMin {
        value,
        closed_form,
        interior,
    }
}

/// `D~_{alpha, v} = D1(C_alpha - alpha C, alpha(1 - alpha) v / (1 + alpha v))`.
pub(crate) fn tilde_exponent(alpha: f64, v: f64) -> f64 {
    d1_raw(tilde_delta_raw(alpha, v), s_lemma2(alpha, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionSizeRate {
    pub value: f64,
    /// The `ell` attaining the maximum ratio.
    pub argmax_ell: usize,
}

/// `a_{v,L} = max_{ell=1..L-1} R ln binom(L, ell) / (D~ L ln L)`.
pub fn section_size_rate_finite(v: f64, sections: usize, rate: f64) -> Result<SectionSizeRate> {
    section_size_rate_finite_with(v, sections, rate, Execution::default())
}

pub fn section_size_rate_finite_with(
    v: f64,
    sections: usize,
    rate: f64,
    exec: Execution,
) -> Result<SectionSizeRate> {
    check_snr(v)?;
    if sections < 2 {
        return domain(format!("section size rate needs L >= 2, got {sections}"));
    }
    if !(rate > 0.0) {
        return domain(format!("rate must be positive, got {rate}"));
    }
    let l = sections as f64;
    let ratios = exec.map_range(sections - 1, |i| {
        let ell = i + 1;
        let alpha = ell as f64 / l;
        rate * log_binomial_raw(sections, ell) / (tilde_exponent(alpha, v) * l * l.ln())
    });
    let (idx, value) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    Ok(SectionSizeRate {
        value,
        argmax_ell: idx + 1,
    })
}

/// `v*`, the root of `(1 + v) ln(1 + v) = 3 v` (about 15.8).
pub fn critical_snr() -> f64 {
    static V_STAR: OnceLock<f64> = OnceLock::new();
    *V_STAR.get_or_init(|| bisect_increasing(|v| (1.0 + v) * v.ln_1p() - 3.0 * v, 0.0, 1.0, 100.0))
}

/// Both closed-form branches of the limiting section size rate at `v`,
/// `(lambda < 1 branch, lambda = 1 branch)`.
pub fn section_size_rate_limit_branches(v: f64, rate: f64) -> Result<(f64, f64)> {
    check_snr(v)?;
    let m = (1.0 + v) * v.ln_1p();
    let interior = rate / ((m - v).powi(2) / (8.0 * v * (1.0 + v)));
    let clamped = rate / ((m - 2.0 * v) / (2.0 * (1.0 + v)));
    Ok((interior, clamped))
}

/// `a_v = lim_{L -> inf} a_{v,L}`.
pub fn section_size_rate_limit(v: f64, rate: f64) -> Result<f64> {
    let (interior, clamped) = section_size_rate_limit_branches(v, rate)?;
    Ok(if v < critical_snr() { interior } else { clamped })
}

/// `tau_v = (1/2)[v - ln(1 + v)] - sqrt(2 v R / a)`.
pub fn tau_v(v: f64, rate: f64, a: f64) -> Result<f64> {
    check_snr(v)?;
    if !(a > 0.0) {
        return domain(format!("section size rate must be positive, got {a}"));
    }
    Ok(0.5 * (v - v.ln_1p()) - (2.0 * v * rate / a).sqrt())
}

/// `d_{n,alpha} = n D~_{alpha,v} - ln binom(L, ell)`, zero at `ell in {0, L}`.
pub fn d_n_alpha(ell: usize, code: &CodeSpec, v: f64) -> Result<f64> {
    check_snr(v)?;
    let sections = code.sections;
    if ell > sections {
        return domain(format!("ell = {ell} exceeds L = {sections}"));
    }
    if ell == 0 || ell == sections {
        return Ok(0.0);
    }
    Ok(d_n_alpha_raw(ell, sections, code.n_real(), v))
}

pub(crate) fn d_n_alpha_raw(ell: usize, sections: usize, n: f64, v: f64) -> f64 {
    let alpha = ell as f64 / sections as f64;
    n * tilde_exponent(alpha, v) - log_binomial_raw(sections, ell)
}

/// Does the optimal lambda of `D~` at this alpha sit below one?
pub fn tilde_exponent_interior(alpha: f64, v: f64) -> bool {
    let s = s_lemma2(alpha, v);
    s > 0.0 && lambda_star_raw(tilde_delta_raw(alpha, v), s) < 1.0
}
