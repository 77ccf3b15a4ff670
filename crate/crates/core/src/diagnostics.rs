//! Codeword power and column geometry of a dictionary: average power for
//! signed and unsigned codes, the worst-case power envelope, column norm and
//! inner product maxima against their union bounds, and the conditional
//! power statistics of a fixed subset under random signs.
//!
//! Norms and inner products are normalized, `(1/n) sum`.

use crate::codec::{inner, norm_sq, Dictionary, SparseCoefficients};
use crate::error::{domain, Result};
use crate::exponent::{inverse_g, inverse_g2};
use crate::rate::{ChannelSpec, CodeSpec};
use serde::{Deserialize, Serialize};

fn section_mean(dict: &Dictionary, section: usize) -> Vec<f64> {
    let b = dict.section_size();
    let mut mean = vec![0.0; dict.rows()];
    for j in 0..b {
        for (m, &x) in mean.iter_mut().zip(dict.section_column(section, j)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= b as f64);
    mean
}

/// `sum_i (sum_{j in sec_i} |X_j|^2) / B`, the mean of `|X beta|^2` over
/// uniformly random signed messages.
pub fn average_power_signed(dict: &Dictionary) -> f64 {
    let b = dict.section_size() as f64;
    (0..dict.columns()).map(|j| norm_sq(dict.column(j))).sum::<f64>() / b
}

/// Standard deviation of [`average_power_signed`] over random dictionaries, `P sqrt(2 / (N n))`.
pub fn average_power_signed_sd(power: f64, columns: usize, rows: usize) -> f64 {
    power * (2.0 / (columns as f64 * rows as f64)).sqrt()
}

/// `sum_i (sum_{j in sec_i} |X_j - Xbar_i|^2) / B + |sum_i Xbar_i|^2`, the
/// mean of `|X beta|^2` over uniformly random unsigned messages.
pub fn average_power_unsigned(dict: &Dictionary) -> f64 {
    let b = dict.section_size();
    let mut total_mean = vec![0.0; dict.rows()];
    let mut spread = 0.0;
    for i in 0..dict.sections() {
        let mean = section_mean(dict, i);
        for j in 0..b {
            let col = dict.section_column(i, j);
            let d: Vec<f64> = col.iter().zip(&mean).map(|(x, m)| x - m).collect();
            spread += norm_sq(&d);
        }
        for (t, m) in total_mean.iter_mut().zip(&mean) {
            *t += m;
        }
    }
    spread / b as f64 + norm_sq(&total_mean)
}

/// `P sqrt(2/n) sqrt(1/(L B) + (1 - 1/L) / B^2)`.
pub fn average_power_unsigned_sd(power: f64, sections: usize, section_size: usize, rows: usize) -> f64 {
    let l = sections as f64;
    let b = section_size as f64;
    power * (2.0 / rows as f64).sqrt() * (1.0 / (l * b) + (1.0 - 1.0 / l) / (b * b)).sqrt()
}

/// `P + P G2((ln |codebook| + ln(1/eps)) / n)` over the `n_int` rows of the
/// dictionary; with `n = n_real` the argument is `R + ln(1/eps)/n`.
pub fn worst_case_power_bound(channel: &ChannelSpec, code: &CodeSpec, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return domain(format!("epsilon must lie in (0, 1], got {epsilon}"));
    }
    let n = code.n_int() as f64;
    let p = channel.power;
    Ok(p + p * inverse_g2((code.log_codebook_size() - epsilon.ln()) / n))
}

/// `P + P G2(R + ln(1/eps) / n)` for explicit `R` and `n`.
pub fn worst_case_power_bound_rate(power: f64, rate: f64, n: f64, epsilon: f64) -> f64 {
    power + power * inverse_g2(rate + (1.0 / epsilon).ln() / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnGeometry {
    pub max_column_power: f64,
    /// `(P/L)(1 + G2(ln(N/eps)/n))`.
    pub column_power_bound: f64,
    /// `None` when the dictionary has a single column.
    pub max_abs_inner_product: Option<f64>,
    /// `(P/L) G(ln(N^2/eps)/n)`.
    pub inner_product_bound: f64,
}

impl ColumnGeometry {
    pub fn column_ok(&self) -> bool {
        self.max_column_power <= self.column_power_bound
    }

    /// Vacuously true without pairs.
    pub fn inner_ok(&self) -> bool {
        self.max_abs_inner_product
            .is_none_or(|m| m <= self.inner_product_bound)
    }
}

/// Column maxima against their union bounds, with `P/L` the dictionary's entry variance.
pub fn column_geometry(dict: &Dictionary, epsilon: f64) -> Result<ColumnGeometry> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return domain(format!("epsilon must lie in (0, 1], got {epsilon}"));
    }
    let n = dict.rows() as f64;
    let big_n = dict.columns() as f64;
    let pl = dict.entry_variance();
    let max_column_power = (0..dict.columns())
        .map(|j| norm_sq(dict.column(j)))
        .fold(0.0, f64::max);
    let max_abs_inner_product = (dict.columns() > 1).then(|| {
        let mut m: f64 = 0.0;
        for a in 0..dict.columns() {
            for b in (a + 1)..dict.columns() {
                m = m.max(inner(dict.column(a), dict.column(b)).abs());
            }
        }
        m
    });
    Ok(ColumnGeometry {
        max_column_power,
        column_power_bound: pl * (1.0 + inverse_g2((big_n / epsilon).ln() / n)),
        max_abs_inner_product,
        inner_product_bound: pl * inverse_g((big_n * big_n / epsilon).ln() / n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPower {
    /// `P_{X,S} = sum_i |X_{j_i}|^2`.
    pub mean: f64,
    /// `2 sum_{i != i'} (X_{j_i} . X_{j_i'})^2`.
    pub variance: f64,
}

/// Mean and variance of `|X beta|^2` over uniformly random signs with the subset fixed.
pub fn codeword_power_stats(dict: &Dictionary, subset: &SparseCoefficients) -> Result<ConditionalPower> {
    if subset.sections() != dict.sections() || subset.indices.iter().any(|&j| j >= dict.section_size()) {
        return domain("subset does not fit the dictionary layout");
    }
    let cols: Vec<&[f64]> = subset
        .indices
        .iter()
        .enumerate()
        .map(|(i, &j)| dict.section_column(i, j))
        .collect();
    let mean = cols.iter().map(|c| norm_sq(c)).sum();
    let mut pairs = 0.0;
    for a in 0..cols.len() {
        for b in (a + 1)..cols.len() {
            let ip = inner(cols[a], cols[b]);
            pairs += ip * ip;
        }
    }
    Ok(ConditionalPower {
        mean,
        variance: 4.0 * pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub signed: bool,
    pub avg_power: f64,
    pub analytic_mean: f64,
    pub analytic_sd: f64,
    /// `|avg_power - P| <= 4 sd`.
    pub avg_power_ok: bool,
    pub epsilon: f64,
    pub worst_case_bound: f64,
    pub geometry: ColumnGeometry,
    pub max_column_power_ok: bool,
    pub inner_product_ok: bool,
}

/// Average power (signed or unsigned per `code`) and column checks at `epsilon`.
/// `P` is taken from the channel; the dictionary may use a smaller design power.
pub fn power_report(dict: &Dictionary, code: &CodeSpec, channel: &ChannelSpec, epsilon: f64) -> Result<PowerReport> {
    if dict.sections() != code.sections || dict.section_size() != code.section_size {
        return domain("dictionary layout does not match the code");
    }
    let design_power = dict.entry_variance() * dict.sections() as f64;
    let (avg_power, analytic_sd) = if code.signed {
        (
            average_power_signed(dict),
            average_power_signed_sd(design_power, dict.columns(), dict.rows()),
        )
    } else {
        (
            average_power_unsigned(dict),
            average_power_unsigned_sd(design_power, dict.sections(), dict.section_size(), dict.rows()),
        )
    };
    let geometry = column_geometry(dict, epsilon)?;
    Ok(PowerReport {
        signed: code.signed,
        avg_power,
        analytic_mean: design_power,
        analytic_sd,
        avg_power_ok: (avg_power - design_power).abs() <= 4.0 * analytic_sd,
        epsilon,
        worst_case_bound: worst_case_power_bound(channel, code, epsilon)?,
        geometry,
        max_column_power_ok: geometry.column_ok(),
        inner_product_ok: geometry.inner_ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::rng::{stream, StreamId};
    use crate::codec::synthesize;
    use rand_core::RngCore;

    fn unit_columns(l: usize, b: usize, n: usize, p: f64) -> Dictionary {
        // columns with |X_j|^2 = P/L exactly: scaled standard basis vectors
        let scale = (n as f64 * p / l as f64).sqrt();
        let cols = (0..l * b)
            .map(|j| {
                let mut c = vec![0.0; n];
                c[j % n] = scale;
                c
            })
            .collect();
        Dictionary::from_columns(l, b, p / l as f64, cols).unwrap()
    }

    #[test]
    fn exact_column_norms_give_p() {
        let d = unit_columns(4, 8, 32, 15.0);
        assert!((average_power_signed(&d) - 15.0).abs() < 1e-12);
        let g = column_geometry(&d, 0.01).unwrap();
        assert_eq!(g.max_abs_inner_product, Some(0.0));
        assert!(g.inner_ok());
    }

    #[test]
    fn identical_section_columns_remove_spread() {
        let col = vec![1.0, -2.0, 0.5];
        let d = Dictionary::from_columns(1, 3, 1.0, vec![col.clone(), col.clone(), col.clone()]).unwrap();
        assert!((average_power_unsigned(&d) - norm_sq(&col)).abs() < 1e-15);
    }

    #[test]
    fn unsigned_sd_exceeds_signed() {
        for &(l, b) in &[(4usize, 16usize), (64, 256), (2, 2)] {
            let s = average_power_signed_sd(15.0, l * b, 100);
            let u = average_power_unsigned_sd(15.0, l, b, 100);
            assert!(u >= s);
        }
    }

    #[test]
    fn sign_average_identity_exhaustive() {
        for l in [1usize, 3, 8] {
            let d = Dictionary::gaussian(40, l, 5, 15.0 / l as f64, 10 + l as u64).unwrap();
            let idx: Vec<usize> = (0..l).map(|i| (3 * i + 1) % 5).collect();
            let stats = codeword_power_stats(&d, &SparseCoefficients::unsigned(idx.clone())).unwrap();
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for mask in 0u32..(1 << l) {
                let signs = (0..l).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
                let beta = SparseCoefficients::signed(idx.clone(), signs).unwrap();
                let p = norm_sq(&synthesize(&d, &beta).unwrap());
                sum += p;
                sum_sq += p * p;
            }
            let k = (1u32 << l) as f64;
            let mean = sum / k;
            let var = sum_sq / k - mean * mean;
            assert!((mean / stats.mean - 1.0).abs() < 1e-10);
            assert!((var - stats.variance).abs() < 1e-8 * stats.mean * stats.mean);
            if l == 1 {
                assert_eq!(stats.variance, 0.0);
            }
        }
    }

    #[test]
    fn unsigned_average_identity_exhaustive() {
        let d = Dictionary::gaussian(25, 2, 3, 7.5, 3).unwrap();
        let mut sum = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                sum += norm_sq(&synthesize(&d, &SparseCoefficients::unsigned(vec![a, b])).unwrap());
            }
        }
        assert!((sum / 9.0 / average_power_unsigned(&d) - 1.0).abs() < 1e-12);
        // the signed display averages signs as well
        let mut signed_sum = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for (s1, s2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    let beta = SparseCoefficients::signed(vec![a, b], vec![s1, s2]).unwrap();
                    signed_sum += norm_sq(&synthesize(&d, &beta).unwrap());
                }
            }
        }
        assert!((signed_sum / 36.0 / average_power_signed(&d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_sign_variance_matches_display() {
        let d = Dictionary::gaussian(30, 6, 4, 2.5, 77).unwrap();
        let idx = vec![0, 1, 2, 3, 0, 1];
        let stats = codeword_power_stats(&d, &SparseCoefficients::unsigned(idx.clone())).unwrap();
        let mut rng = stream(5, StreamId::Auxiliary);
        let draws = 100_000;
        let (mut s, mut ss) = (0.0, 0.0);
        for _ in 0..draws {
            let bits = rng.next_u64();
            let signs = (0..6).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
            let p = norm_sq(&synthesize(&d, &SparseCoefficients::signed(idx.clone(), signs).unwrap()).unwrap());
            s += p;
            ss += p * p;
        }
        let mean = s / draws as f64;
        let var = ss / draws as f64 - mean * mean;
        assert!((var / stats.variance - 1.0).abs() < 0.1, "{var} vs {}", stats.variance);
    }

    #[test]
    fn worst_case_bound_limits() {
        let ch = ChannelSpec::from_snr(15.0).unwrap();
        let code = CodeSpec::new(4, 16, false, 1.0).unwrap();
        let b = worst_case_power_bound(&ch, &code, 0.02).unwrap();
        assert!(b > 15.0);
        assert!((worst_case_power_bound_rate(15.0, 0.0, 100.0, 1.0) - 15.0).abs() < 1e-12);
        let far = worst_case_power_bound_rate(15.0, 1.0, 1e12, 0.01);
        assert!((far - (15.0 + 15.0 * inverse_g2(1.0))).abs() < 1e-6);
        assert!(worst_case_power_bound(&ch, &code, 0.0).is_err());
    }

    #[test]
    fn single_column_has_no_pairs() {
        let d = Dictionary::gaussian(10, 1, 1, 1.0, 1).unwrap();
        let g = column_geometry(&d, 0.1).unwrap();
        assert_eq!(g.max_abs_inner_product, None);
        assert!(g.inner_ok());
    }
}
