use super::dictionary::Dictionary;
use super::rng::{standard_normal, stream, uniform_below, StreamId};
use crate::error::{domain, Result};
use crate::rate::CodeSpec;
use rand_core::RngCore;

/// One selected column (and sign) per section.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseCoefficients {
    pub indices: Vec<usize>,
    /// `+1` or `-1`; all `+1` for unsigned codes.
    pub signs: Vec<i8>,
}

impl SparseCoefficients {
    pub fn unsigned(indices: Vec<usize>) -> Self {
        let signs = vec![1; indices.len()];
        Self { indices, signs }
    }

    pub fn signed(indices: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        if indices.len() != signs.len() {
            return domain("index and sign lists differ in length");
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return domain("signs must be +1 or -1");
        }
        Ok(Self { indices, signs })
    }

    pub fn sections(&self) -> usize {
        self.indices.len()
    }

    /// Per-section symbols in enumeration order: `index` when unsigned,
    /// `2 index + (sign < 0)` when signed.
    pub fn symbols(&self, signed: bool) -> Vec<usize> {
        self.indices
            .iter()
            .zip(&self.signs)
            .map(|(&j, &s)| if signed { 2 * j + usize::from(s < 0) } else { j })
            .collect()
    }

    pub fn from_symbols(symbols: &[usize], signed: bool) -> Self {
        if signed {
            Self {
                indices: symbols.iter().map(|s| s / 2).collect(),
                signs: symbols.iter().map(|s| if s % 2 == 1 { -1 } else { 1 }).collect(),
            }
        } else {
            Self::unsigned(symbols.to_vec())
        }
    }

    /// Dense `beta` of length `L B` (unit magnitudes).
    pub fn to_dense(&self, section_size: usize) -> Vec<f64> {
        let mut beta = vec![0.0; self.sections() * section_size];
        for (i, (&j, &s)) in self.indices.iter().zip(&self.signs).enumerate() {
            beta[i * section_size + j] = f64::from(s);
        }
        beta
    }

    fn check(&self, code: &CodeSpec) -> Result<()> {
        if self.sections() != code.sections {
            return domain(format!(
                "coefficients have {} sections, code has {}",
                self.sections(),
                code.sections
            ));
        }
        if self.indices.iter().any(|&j| j >= code.section_size) {
            return domain(format!("index out of range for B = {}", code.section_size));
        }
        if !code.signed && self.signs.iter().any(|&s| s != 1) {
            return domain("negative sign in an unsigned code");
        }
        Ok(())
    }
}

fn index_bits(code: &CodeSpec) -> Result<usize> {
    code.index_bits()
        .map(|b| b as usize)
        .ok_or_else(|| crate::Error::Domain(format!("bit mapping needs B a power of two, got {}", code.section_size)))
}

/// Maps `K` input bits to coefficients. Each section reads its substring
/// big-endian; a signed substring starts with the sign bit (`0` means `+1`).
pub fn encode(bits: &[bool], code: &CodeSpec) -> Result<SparseCoefficients> {
    let b = index_bits(code)?;
    let per = b + usize::from(code.signed);
    let k = per * code.sections;
    if bits.len() != k {
        return domain(format!("expected {k} input bits, got {}", bits.len()));
    }
    let mut indices = Vec::with_capacity(code.sections);
    let mut signs = Vec::with_capacity(code.sections);
    for chunk in bits.chunks(per) {
        let (sign, rest) = if code.signed { (chunk[0], &chunk[1..]) } else { (false, chunk) };
        signs.push(if sign { -1 } else { 1 });
        indices.push(rest.iter().fold(0usize, |acc, &x| (acc << 1) | usize::from(x)));
    }
    Ok(SparseCoefficients { indices, signs })
}

/// Inverse of [`encode`].
pub fn decode_bits(beta: &SparseCoefficients, code: &CodeSpec) -> Result<Vec<bool>> {
    let b = index_bits(code)?;
    beta.check(code)?;
    let mut bits = Vec::with_capacity(code.input_bits().unwrap_or(0));
    for (&j, &s) in beta.indices.iter().zip(&beta.signs) {
        if code.signed {
            bits.push(s < 0);
        }
        bits.extend((0..b).rev().map(|k| (j >> k) & 1 == 1));
    }
    Ok(bits)
}

/// Uniformly random message for `code`.
pub fn random_coefficients<R: RngCore>(code: &CodeSpec, rng: &mut R) -> SparseCoefficients {
    let mut indices = Vec::with_capacity(code.sections);
    let mut signs = Vec::with_capacity(code.sections);
    for _ in 0..code.sections {
        indices.push(uniform_below(rng, code.section_size as u64) as usize);
        signs.push(if code.signed && rng.next_u64() >> 63 == 1 { -1 } else { 1 });
    }
    SparseCoefficients { indices, signs }
}

/// Codeword `X beta`, the signed sum of the selected columns.
pub fn synthesize(dict: &Dictionary, beta: &SparseCoefficients) -> Result<Vec<f64>> {
    if beta.sections() != dict.sections() || beta.indices.iter().any(|&j| j >= dict.section_size()) {
        return domain("coefficients do not fit the dictionary layout");
    }
    let mut c = vec![0.0; dict.rows()];
    for (i, (&j, &s)) in beta.indices.iter().zip(&beta.signs).enumerate() {
        let col = dict.section_column(i, j);
        let s = f64::from(s);
        for (ci, &x) in c.iter_mut().zip(col) {
            *ci += s * x;
        }
    }
    Ok(c)
}

/// Normalized squared norm `(1/n) sum a_i^2`.
pub fn norm_sq(a: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.iter().map(|x| x * x).sum::<f64>() / a.len() as f64
}

/// Normalized inner product `(1/n) sum a_i b_i`.
pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

/// `Y = c + noise`, noise i.i.d. `N(0, sigma2)` from the seed's noise stream.
pub fn awgn_channel(c: &[f64], sigma2: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return domain(format!("noise variance must be nonnegative, got {sigma2}"));
    }
    if sigma2 == 0.0 {
        return Ok(c.to_vec());
    }
    let sd = sigma2.sqrt();
    let mut rng = stream(seed, StreamId::Noise);
    Ok(c.iter().map(|&x| x + sd * standard_normal(&mut rng)).collect())
}

/// Normalized `|Y - X beta|^2`.
pub fn residual_sq(dict: &Dictionary, y: &[f64], beta: &SparseCoefficients) -> Result<f64> {
    if y.len() != dict.rows() {
        return domain(format!("received vector has length {}, dictionary has {} rows", y.len(), dict.rows()));
    }
    let c = synthesize(dict, beta)?;
    Ok(y.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64)
}

/// `T(S) = (1/2)[|Y - X_S|^2 - |Y - X_{S*}|^2] / sigma^2`.
pub fn test_statistic(
    dict: &Dictionary,
    y: &[f64],
    s: &SparseCoefficients,
    s_star: &SparseCoefficients,
    sigma2: f64,
) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return domain(format!("test statistic needs positive noise variance, got {sigma2}"));
    }
    if s == s_star {
        return Ok(0.0);
    }
    Ok(0.5 * (residual_sq(dict, y, s)? - residual_sq(dict, y, s_star)?) / sigma2)
}

/// Sections whose index differs, or whose sign differs on a signed code.
pub fn count_mistakes(decoded: &SparseCoefficients, truth: &SparseCoefficients) -> Result<usize> {
    if decoded.sections() != truth.sections() {
        return domain(format!(
            "section counts differ: {} vs {}",
            decoded.sections(),
            truth.sections()
        ));
    }
    Ok(decoded
        .indices
        .iter()
        .zip(&decoded.signs)
        .zip(truth.indices.iter().zip(&truth.signs))
        .filter(|(a, b)| a != b)
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::rng::stream;

    fn code(l: usize, b: usize, signed: bool) -> CodeSpec {
        CodeSpec::new(l, b, signed, 1.0).unwrap()
    }

    #[test]
    fn encode_conventions() {
        let c = code(2, 4, false);
        let beta = encode(&[true, true, false, true], &c).unwrap();
        assert_eq!(beta.indices, vec![3, 1]);
        let zero = encode(&[false; 4], &c).unwrap();
        assert_eq!(zero.indices, vec![0, 0]);
        assert_eq!(zero.signs, vec![1, 1]);
        let s = code(2, 4, true);
        let beta = encode(&[true, false, true, false, true, true], &s).unwrap();
        assert_eq!(beta.indices, vec![1, 3]);
        assert_eq!(beta.signs, vec![-1, 1]);
        assert!(encode(&[true; 3], &c).is_err());
        assert!(encode(&[true; 4], &code(2, 3, false)).is_err());
    }

    #[test]
    fn bit_round_trip_exhaustive() {
        for signed in [false, true] {
            let c = code(2, 4, signed);
            let k = c.input_bits().unwrap();
            for m in 0..(1u32 << k) {
                let bits: Vec<bool> = (0..k).rev().map(|i| (m >> i) & 1 == 1).collect();
                let beta = encode(&bits, &c).unwrap();
                assert_eq!(decode_bits(&beta, &c).unwrap(), bits);
            }
        }
    }

    #[test]
    fn symbols_round_trip() {
        let beta = SparseCoefficients::signed(vec![3, 0, 2], vec![-1, 1, -1]).unwrap();
        assert_eq!(SparseCoefficients::from_symbols(&beta.symbols(true), true), beta);
        assert!(SparseCoefficients::signed(vec![1], vec![0]).is_err());
    }

    #[test]
    fn synthesize_linearity() {
        let d = Dictionary::gaussian(20, 3, 4, 1.0, 5).unwrap();
        let beta = SparseCoefficients::signed(vec![1, 2, 3], vec![1, -1, 1]).unwrap();
        let flipped = SparseCoefficients::signed(vec![1, 2, 3], vec![-1, 1, -1]).unwrap();
        let a = synthesize(&d, &beta).unwrap();
        let b = synthesize(&d, &flipped).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| *x == -*y));
        let one = Dictionary::gaussian(20, 1, 4, 1.0, 5).unwrap();
        let c = synthesize(&one, &SparseCoefficients::unsigned(vec![2])).unwrap();
        assert_eq!(c, one.column(2));
    }

    #[test]
    fn channel_behaviour() {
        let c = vec![1.0; 4000];
        assert_eq!(awgn_channel(&c, 0.0, 1).unwrap(), c);
        assert!(awgn_channel(&c, -1.0, 1).is_err());
        let y = awgn_channel(&c, 2.0, 1).unwrap();
        assert_eq!(y, awgn_channel(&c, 2.0, 1).unwrap());
        let diff: Vec<f64> = y.iter().zip(&c).map(|(a, b)| a - b).collect();
        // |Y - c|^2 ~ sigma^2 chi^2_n / n, sd sigma^2 sqrt(2/n)
        let sd = 2.0 * (2.0 / 4000.0f64).sqrt();
        assert!((norm_sq(&diff) - 2.0).abs() < 5.0 * sd);
    }

    #[test]
    fn statistic_and_mistakes() {
        let d = Dictionary::gaussian(30, 2, 4, 1.0, 8).unwrap();
        let truth = SparseCoefficients::unsigned(vec![1, 2]);
        let other = SparseCoefficients::unsigned(vec![3, 2]);
        let y = awgn_channel(&synthesize(&d, &truth).unwrap(), 0.5, 3).unwrap();
        assert_eq!(test_statistic(&d, &y, &truth, &truth, 0.5).unwrap(), 0.0);
        let t = test_statistic(&d, &y, &other, &truth, 0.5).unwrap();
        let direct = 0.5 * (residual_sq(&d, &y, &other).unwrap() - residual_sq(&d, &y, &truth).unwrap()) / 0.5;
        assert!((t - direct).abs() <= 1e-12 * direct.abs());
        assert!(test_statistic(&d, &y, &other, &truth, 0.0).is_err());
        assert_eq!(count_mistakes(&truth, &truth).unwrap(), 0);
        assert_eq!(count_mistakes(&other, &truth).unwrap(), 1);
        let all = SparseCoefficients::unsigned(vec![0, 0]);
        assert_eq!(count_mistakes(&all, &truth).unwrap(), 2);
        let s1 = SparseCoefficients::signed(vec![1, 2], vec![1, 1]).unwrap();
        let s2 = SparseCoefficients::signed(vec![1, 2], vec![1, -1]).unwrap();
        assert_eq!(count_mistakes(&s1, &s2).unwrap(), 1);
        assert!(count_mistakes(&s1, &SparseCoefficients::unsigned(vec![1])).is_err());
    }

    #[test]
    fn random_messages_cover_range() {
        let c = code(3, 8, true);
        let mut rng = stream(1, StreamId::Message);
        let mut seen_neg = false;
        for _ in 0..200 {
            let beta = random_coefficients(&c, &mut rng);
            assert!(beta.indices.iter().all(|&j| j < 8));
            seen_neg |= beta.signs.contains(&-1);
        }
        assert!(seen_neg);
    }
}
