//! Binomial confidence intervals for Monte Carlo error frequencies.

use crate::normal::q_inverse;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Two-sided standard normal critical value at the given confidence.
pub fn z_two_sided(confidence: f64) -> f64 {
    q_inverse(0.5 * (1.0 - confidence))
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let z = z_two_sided(confidence);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    }
}

/// Wald half width `z sqrt(p (1 - p) / trials)`.
pub fn normal_half_width(p_hat: f64, trials: u64, confidence: f64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    z_two_sided(confidence) * (p_hat * (1.0 - p_hat) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        for &(k, n) in &[(0u64, 10u64), (3, 10), (10, 10), (1, 1000)] {
            let iv = wilson_interval(k, n, 0.99);
            let p = k as f64 / n as f64;
            assert!(iv.lo <= p + 1e-15 && p <= iv.hi + 1e-15);
        }
        let iv = wilson_interval(0, 100, 0.95);
        assert_eq!(iv.lo, 0.0);
        assert!((iv.hi - 0.036_994).abs() < 1e-5, "{}", iv.hi);
    }

    #[test]
    fn half_width() {
        assert!((z_two_sided(0.95) - 1.959_963_984_540_054).abs() < 1e-12);
        let h = normal_half_width(0.5, 100, 0.95);
        assert!((h - 0.098).abs() < 1e-3);
        assert_eq!(normal_half_width(0.0, 100, 0.99), 0.0);
    }
}
