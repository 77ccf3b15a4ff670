//! Large-deviation exponents for differences of squared correlated normals.
//!
//! For `Z`, `Z~` standard normal with correlation `rho`, half the difference of
//! squares has cumulant generating function `-(1/2) ln(1 - lambda^2 s)` where
//! `s = 1 - rho^2`. Everything here is parameterised by `s` and measured in nats.

use crate::error::{domain, Result};
use crate::numeric::{bisect_increasing, upper_bracket};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExponentBranch {
    /// The maximising `lambda` is the stationary point.
    Interior,
    /// The `[0, 1]` restriction is active and `lambda = 1`.
    ClampedAtOne,
    /// `s = 0`: the statistic is degenerate (perfect correlation).
    DegenerateRhoOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentResult {
    pub value: f64,
    pub lambda_opt: f64,
    pub branch: ExponentBranch,
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_nan() || delta < 0.0 {
        return domain(format!("delta must be nonnegative, got {delta}"));
    }
    Ok(())
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return domain(format!("s = 1 - rho^2 must lie in [0, 1], got {s}"));
    }
    Ok(())
}

/// `gamma = sqrt(1 + q) - 1` in a form that stays accurate for tiny `q`.
#[inline]
fn gamma_of(q: f64) -> f64 {
    q / ((1.0 + q).sqrt() + 1.0)
}

#[inline]
fn d_of_gamma(gamma: f64) -> f64 {
    0.5 * (gamma - (0.5 * gamma).ln_1p())
}

/// Unrestricted maximiser, `(1/2delta)(sqrt(1 + 4 delta^2 / s) - 1)`.
#[inline]
pub(crate) fn lambda_star_raw(delta: f64, s: f64) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    let q = 4.0 * delta * delta / s;
    2.0 * delta / (s * ((1.0 + q).sqrt() + 1.0))
}

/// Closed form of `max_{lambda >= 0} lambda delta + (1/2) ln(1 - lambda^2 s)`, no checks.
#[inline]
pub(crate) fn d_raw(delta: f64, s: f64) -> f64 {
    if delta <= 0.0 {
        return 0.0;
    }
    if s == 0.0 {
        return f64::INFINITY;
    }
    d_of_gamma(gamma_of(4.0 * delta * delta / s))
}

/// Same as [`d_raw`] with `lambda` restricted to `[0, 1]`.
#[inline]
pub(crate) fn d1_raw(delta: f64, s: f64) -> f64 {
    if delta <= 0.0 {
        return 0.0;
    }
    if s == 0.0 {
        return delta;
    }
    if lambda_star_raw(delta, s) < 1.0 {
        d_raw(delta, s)
    } else {
        delta + 0.5 * (-s).ln_1p()
    }
}

/// The exponent `D(delta, s)`.
///
/// Returns `+inf` (with `lambda_opt = +inf`) for `s = 0` and `delta > 0`,
/// where the supremum is unbounded.
pub fn exponent_d(delta: f64, s: f64) -> Result<ExponentResult> {
    check_delta(delta)?;
    check_s(s)?;
    if s == 0.0 {
        let (value, lambda_opt) = if delta == 0.0 {
            (0.0, 0.0)
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        return Ok(ExponentResult {
            value,
            lambda_opt,
            branch: ExponentBranch::DegenerateRhoOne,
        });
    }
    Ok(ExponentResult {
        value: d_raw(delta, s),
        lambda_opt: lambda_star_raw(delta, s),
        branch: ExponentBranch::Interior,
    })
}

/// The exponent `D1(delta, s)` with `lambda` restricted to `[0, 1]`.
pub fn exponent_d1(delta: f64, s: f64) -> Result<ExponentResult> {
    check_delta(delta)?;
    check_s(s)?;
    if s == 0.0 {
        return Ok(ExponentResult {
            value: delta,
            lambda_opt: 1.0,
            branch: ExponentBranch::DegenerateRhoOne,
        });
    }
    let lambda = lambda_star_raw(delta, s);
    if lambda < 1.0 {
        Ok(ExponentResult {
            value: d_raw(delta, s),
            lambda_opt: lambda,
            branch: ExponentBranch::Interior,
        })
    } else {
        Ok(ExponentResult {
            value: delta + 0.5 * (-s).ln_1p(),
            lambda_opt: 1.0,
            branch: ExponentBranch::ClampedAtOne,
        })
    }
}

/// Unrestricted optimal `lambda`. Returns 0 for `delta = 0` by continuity.
pub fn optimal_lambda(delta: f64, s: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(s > 0.0 && s <= 1.0) {
        return domain(format!("optimal_lambda needs s in (0, 1], got {s}"));
    }
    Ok(lambda_star_raw(delta, s))
}

/// Derivative of `D1(., s)` with respect to `delta`.
///
/// Equals `2 delta / (s (1 + sqrt(1 + 4 delta^2 / s)))` on the interior branch
/// and 1 once the restriction binds (including `s = 0`).
pub fn exponent_d1_derivative(delta: f64, s: f64) -> Result<f64> {
    check_delta(delta)?;
    check_s(s)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok(lambda_star_raw(delta, s).min(1.0))
}

/// `G`, the inverse of `delta -> D(delta, 1)`. Near `sqrt(2 r)` for small `r`.
pub fn inverse_g(r: f64) -> f64 {
    if r.is_nan() || r <= 0.0 {
        return 0.0;
    }
    let f = |x: f64| d_raw(x, 1.0);
    // D(x, 1) >= gamma / 4 and gamma ~ 2x, so the root is below 4r + sqrt(2r) + 1.
    let hi = upper_bracket(f, r, (2.0 * r).sqrt() + 4.0 * r + 1.0);
    bisect_increasing(f, r, 0.0, hi)
}

/// `D2(delta) = (1/2)(delta - ln(1 + delta))`, the chi-square upper-tail exponent.
pub fn exponent_d2(delta: f64) -> f64 {
    if delta <= 0.0 {
        return 0.0;
    }
    0.5 * (delta - delta.ln_1p())
}

/// `G2`, the inverse of [`exponent_d2`] on `[0, inf)`.
pub fn inverse_g2(r: f64) -> f64 {
    if r.is_nan() || r <= 0.0 {
        return 0.0;
    }
    let hi = upper_bracket(exponent_d2, r, 2.0 * r.sqrt() + 2.0 * r + 1.0);
    bisect_increasing(exponent_d2, r, 0.0, hi)
}

/// Cumulant generating function `-(1/2) ln(1 - lambda^2 alpha v / (1 + alpha v))`.
///
/// Returns `+inf` when the argument of the logarithm is not positive.
pub fn psi_alpha(lambda: f64, alpha: f64, v: f64) -> f64 {
    let s = alpha * v / (1.0 + alpha * v);
    let arg = 1.0 - lambda * lambda * s;
    if arg <= 0.0 {
        f64::INFINITY
    } else {
        -0.5 * arg.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Plain grid maximisation of `lambda delta + (1/2) ln(1 - lambda^2 s)`.
    fn grid_max(delta: f64, s: f64, lambda_max: f64, step: f64) -> f64 {
        let steps = (lambda_max / step).round() as usize;
        (0..=steps)
            .map(|k| {
                let l = k as f64 * step;
                let arg = 1.0 - l * l * s;
                if arg <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    l * delta + 0.5 * arg.ln()
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn zero_gap_gives_zero_exponent() {
        let r = exponent_d(0.0, 0.5).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.lambda_opt, 0.0);
        assert_eq!(exponent_d1(0.0, 0.5).unwrap().value, 0.0);
    }

    #[test]
    fn d_matches_grid_at_reference_points() {
        // q = 3, gamma = 1
        let delta = 3f64.sqrt() / 2.0;
        let r = exponent_d(delta, 1.0).unwrap();
        assert!((r.value - 0.29727).abs() < 5e-6, "{}", r.value);
        assert!((r.lambda_opt - 0.57735).abs() < 5e-6);
        assert!((r.value - grid_max(delta, 1.0, 10.0, 1e-5)).abs() < 1e-6);
        let r = exponent_d(1.0, 1.0).unwrap();
        assert!((r.value - 0.377_428_076_220_093).abs() < 1e-12);
        assert!((r.value - grid_max(1.0, 1.0, 10.0, 1e-5)).abs() < 1e-6);
    }

    #[test]
    fn d1_reference_points() {
        assert_eq!(exponent_d1(0.7, 0.0).unwrap().value, 0.7);
        assert_eq!(
            exponent_d1(0.7, 0.0).unwrap().branch,
            ExponentBranch::DegenerateRhoOne
        );

        let r = exponent_d1(2.0, 0.5).unwrap();
        assert_eq!(r.branch, ExponentBranch::ClampedAtOne);
        assert!((r.value - (2.0 + 0.5 * 0.5f64.ln())).abs() < 1e-14);
        assert!((r.value - 1.65343).abs() < 5e-6);
        assert!((r.value - grid_max(2.0, 0.5, 1.0, 1e-5)).abs() < 1e-6);

        let r = exponent_d1(3f64.sqrt() / 2.0, 1.0).unwrap();
        assert_eq!(r.branch, ExponentBranch::Interior);
        assert!((r.value - 0.29727).abs() < 5e-6);
    }

    #[test]
    fn degenerate_unrestricted_is_infinite() {
        let r = exponent_d(0.3, 0.0).unwrap();
        assert!(r.value.is_infinite());
        assert_eq!(r.branch, ExponentBranch::DegenerateRhoOne);
    }

    #[test]
    fn domain_errors() {
        assert!(exponent_d(-0.1, 0.5).is_err());
        assert!(exponent_d(0.1, 1.5).is_err());
        assert!(exponent_d1(0.1, -0.5).is_err());
        assert!(exponent_d(f64::NAN, 0.5).is_err());
        assert!(optimal_lambda(0.1, 0.0).is_err());
    }

    #[test]
    fn optimal_lambda_values() {
        // series: lambda* ~ delta / s for small delta
        let l = optimal_lambda(1e-6, 0.5).unwrap();
        assert!(((l - 2e-6) / 2e-6).abs() < 1e-6);
        assert_eq!(optimal_lambda(0.0, 0.5).unwrap(), 0.0);
        let l = optimal_lambda(3f64.sqrt() / 2.0, 1.0).unwrap();
        assert!((l - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        let l = optimal_lambda(2.0, 0.5).unwrap();
        assert!((l - (33f64.sqrt() - 1.0) / 4.0).abs() < 1e-14);
        assert!((l - 1.18614).abs() < 5e-6);
    }

    #[test]
    fn inverse_g_values() {
        assert_eq!(inverse_g(0.0), 0.0);
        let d = exponent_d(1.0, 1.0).unwrap().value;
        assert!((inverse_g(d) - 1.0).abs() < 1e-12);
        assert!((inverse_g(0.37740) - 1.0).abs() < 1e-4);
        let g = inverse_g(5e-5);
        assert!(((g - 0.01) / 0.01).abs() < 0.01);
    }

    #[test]
    fn d2_and_g2_values() {
        assert_eq!(exponent_d2(0.0), 0.0);
        assert!((exponent_d2(1.0) - 0.5 * (1.0 - 2f64.ln())).abs() < 1e-15);
        assert!((exponent_d2(1.0) - 0.15343).abs() < 5e-6);
        assert!((inverse_g2(exponent_d2(1.0)) - 1.0).abs() < 1e-12);
        // asymptotes: 2 sqrt(r) small, ~2r large
        let r = 1e-8;
        assert!((inverse_g2(r) / (2.0 * r.sqrt()) - 1.0).abs() < 1e-3);
        let r = 1e4;
        assert!((inverse_g2(r) / (2.0 * r) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi_alpha(0.0, 0.3, 7.0), 0.0);
        assert!((psi_alpha(1.0, 1.0, 15.0) - 0.5 * 16f64.ln()).abs() < 1e-14);
        // lambda = 1, s = 1 cannot happen for finite v, but force the sentinel
        assert!(psi_alpha(2.0, 1.0, 15.0).is_infinite());
    }

    #[test]
    fn lemma1_identity_between_psi_and_d1() {
        for &(delta, alpha, v) in &[(0.2, 0.3, 15.0), (1.5, 0.5, 3.0), (0.05, 0.9, 100.0)] {
            let steps = 100_000;
            let best = (0..=steps)
                .map(|k| {
                    let l = k as f64 / steps as f64;
                    l * delta - psi_alpha(l, alpha, v)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let s = alpha * v / (1.0 + alpha * v);
            let d1 = exponent_d1(delta, s).unwrap().value;
            assert!((best - d1).abs() < 1e-8, "{best} vs {d1}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &(delta, s) in &[(0.1, 0.5), (2.0, 0.5), (0.3, 0.9)] {
            let h = 1e-6;
            let fd = (d1_raw(delta + h, s) - d1_raw(delta - h, s)) / (2.0 * h);
            let an = exponent_d1_derivative(delta, s).unwrap();
            assert!((fd - an).abs() < 1e-6, "{fd} vs {an}");
        }
    }

    proptest! {
        #[test]
        fn d_at_least_gamma_over_four(delta in 0.0f64..10.0, s in 0.001f64..1.0) {
            let gamma = gamma_of(4.0 * delta * delta / s);
            prop_assert!(d_raw(delta, s) >= gamma / 4.0 - 1e-15);
        }

        #[test]
        fn d1_never_exceeds_d(delta in 0.0f64..10.0, s in 0.001f64..1.0) {
            let d = exponent_d(delta, s).unwrap();
            let d1 = exponent_d1(delta, s).unwrap();
            prop_assert!(d1.value <= d.value + 1e-15);
            if d1.branch == ExponentBranch::Interior {
                prop_assert_eq!(d1.value, d.value);
            } else {
                prop_assert!(d1.value < d.value);
                // between delta/2 and delta on the clamped branch
                prop_assert!(d1.value >= delta - 0.5 * delta.ln_1p() - 1e-12);
                prop_assert!(d1.value >= delta / 2.0 - 1e-12);
                prop_assert!(d1.value <= delta);
            }
        }

        #[test]
        fn monotone_in_delta_and_s(delta in 0.0f64..5.0, dd in 0.0f64..1.0, s in 0.01f64..0.98, ds in 0.0f64..0.01) {
            prop_assert!(d1_raw(delta + dd, s) >= d1_raw(delta, s));
            prop_assert!(d_raw(delta + dd, s) >= d_raw(delta, s));
            prop_assert!(d1_raw(delta, s + ds) <= d1_raw(delta, s) + 1e-15);
            prop_assert!(d_raw(delta, s + ds) <= d_raw(delta, s) + 1e-15);
        }

        #[test]
        fn inverse_round_trips(r in 1e-8f64..10.0) {
            let g = inverse_g(r);
            prop_assert!(((d_raw(g, 1.0) - r) / r).abs() < 1e-9);
            let g2 = inverse_g2(r);
            prop_assert!(((exponent_d2(g2) - r) / r).abs() < 1e-9);
        }
    }
}
