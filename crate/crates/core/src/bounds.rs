//! Error-probability bounds for least-squares decoding: the single-term and
//! two-term per-`ell` bounds, the mistake-tail sum, minimal section size rate
//! for a target, composite achievable rate search, and the normal
//! approximation comparator.
//!
//! Everything is evaluated in log space and exponentiated once at the end.

use crate::error::{domain, Error, Result};
use crate::exponent::{d1_raw, d_raw};
use crate::normal::q_inverse;
use crate::numeric::{golden_min, log_add_exp};
use crate::par::Execution;
use crate::rate::{
    capacity, ell_from_alpha, log_binomial_raw, s_lemma1, s_lemma2, ChannelSpec, CodeSpec,
};
use serde::{Deserialize, Serialize};

/// Interior grid points used before golden-section refinement of `t_alpha`.
pub const T_ALPHA_GRID: usize = 256;
const GOLDEN_ITERS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub channel: ChannelSpec,
    pub code: CodeSpec,
    /// Threshold `t = delta0 / (2 sigma^2)` in nats.
    pub t: f64,
    pub alpha0: f64,
    pub epsilon: f64,
}

impl BoundQuery {
    pub fn new(channel: ChannelSpec, code: CodeSpec, t: f64, alpha0: f64, epsilon: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return domain(format!("threshold t must be nonnegative, got {t}"));
        }
        if !(alpha0 > 0.0 && alpha0 <= 1.0) || alpha0 * (code.sections as f64) < 1.0 - 1e-9 {
            return domain(format!(
                "alpha0 must lie in (0, 1] with alpha0 L >= 1, got alpha0 = {alpha0}, L = {}",
                code.sections
            ));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
        }
        Ok(Self {
            channel,
            code,
            t,
            alpha0,
            epsilon,
        })
    }

    /// First counted mistake level, `ceil(alpha0 L)`.
    pub fn ell0(&self) -> usize {
        ((self.alpha0 * self.code.sections as f64) - 1e-9).ceil().max(1.0) as usize
    }

    fn params(&self) -> Params {
        Params {
            v: self.channel.snr(),
            sections: self.code.sections,
            n: self.code.n_real(),
            rate: self.code.rate,
            t: self.t,
        }
    }
}

/// The scalars every bound depends on.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Params {
    pub v: f64,
    pub sections: usize,
    pub n: f64,
    pub rate: f64,
    pub t: f64,
}

impl Params {
    fn alpha(&self, ell: usize) -> f64 {
        ell as f64 / self.sections as f64
    }

    /// `C_alpha - alpha R`.
    fn gap(&self, alpha: f64) -> f64 {
        0.5 * (alpha * self.v).ln_1p() - alpha * self.rate
    }
}

fn check_ell(ell: usize, sections: usize) -> Result<()> {
    if ell == 0 || ell > sections {
        return domain(format!("ell must lie in 1..={sections}, got {ell}"));
    }
    Ok(())
}

/// Natural log of the single-term bound, capped at zero.
pub(crate) fn lemma1_log(ell: usize, p: &Params) -> f64 {
    let alpha = p.alpha(ell);
    let delta = p.gap(alpha) - p.t;
    if delta <= 0.0 {
        return 0.0;
    }
    (log_binomial_raw(p.sections, ell) - p.n * d1_raw(delta, s_lemma1(alpha, p.v))).min(0.0)
}

/// `binom(L, ell) exp{-n D1(C_alpha - alpha R - t, alpha v / (1 + alpha v))}`, clamped to `[0, 1]`.
pub fn lemma1_bound(ell: usize, q: &BoundQuery) -> Result<f64> {
    check_ell(ell, q.code.sections)?;
    Ok(lemma1_log(ell, &q.params()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma2 {
    pub probability: f64,
    /// Log of the unclamped optimum (may exceed zero).
    pub log_value: f64,
    /// Minimising `t_alpha`; `NaN` when the interval is empty.
    pub t_alpha: f64,
    /// Log of `binom(L, ell) exp{-n D1(C_alpha - alpha R - t_alpha, 1 - rho_alpha^2)}` at the optimum.
    pub log_main: f64,
    /// Log of `exp{-n D(t_alpha - t, alpha^2 v / (1 + alpha^2 v))}` at the optimum.
    pub log_star: f64,
}

impl Lemma2 {
    fn vacuous() -> Self {
        Self {
            probability: 1.0,
            log_value: 0.0,
            t_alpha: f64::NAN,
            log_main: 0.0,
            log_star: 0.0,
        }
    }
}

pub(crate) fn lemma2_with_grid(ell: usize, p: &Params, grid: usize) -> Lemma2 {
    let alpha = p.alpha(ell);
    let upper = p.gap(alpha);
    if upper <= p.t {
        return Lemma2::vacuous();
    }
    let lbin = log_binomial_raw(p.sections, ell);
    let s2 = s_lemma2(alpha, p.v);
    let av = alpha * alpha * p.v;
    let s3 = av / (1.0 + av);
    let parts = |ta: f64| {
        let main = lbin - p.n * d1_raw(upper - ta, s2);
        let star = -p.n * d_raw(ta - p.t, s3);
        (main, star)
    };
    let objective = |ta: f64| {
        let (m, s) = parts(ta);
        log_add_exp(m, s)
    };
    let w = upper - p.t;
    let step = w / (grid + 1) as f64;
    let (k_best, _) = (1..=grid)
        .map(|k| (k, objective(p.t + k as f64 * step)))
        .fold((1, f64::INFINITY), |best, (k, f)| if f < best.1 { (k, f) } else { best });
    let lo = p.t + (k_best - 1) as f64 * step;
    let hi = p.t + (k_best + 1) as f64 * step;
    let (t_alpha, log_value) = golden_min(objective, lo, hi, GOLDEN_ITERS);
    let (log_main, log_star) = parts(t_alpha);
    Lemma2 {
        probability: log_value.min(0.0).exp(),
        log_value,
        t_alpha,
        log_main,
        log_star,
    }
}

pub(crate) fn lemma2_log(ell: usize, p: &Params) -> Lemma2 {
    lemma2_with_grid(ell, p, T_ALPHA_GRID)
}

/// Two-term bound minimised over `t_alpha` in `(t, C_alpha - alpha R)`.
pub fn lemma2_bound(ell: usize, q: &BoundQuery) -> Result<Lemma2> {
    check_ell(ell, q.code.sections)?;
    Ok(lemma2_log(ell, &q.params()))
}

/// Same as [`lemma2_bound`] with a caller-chosen number of interior grid points.
pub fn lemma2_bound_with_grid(ell: usize, q: &BoundQuery, grid: usize) -> Result<Lemma2> {
    check_ell(ell, q.code.sections)?;
    if grid == 0 {
        return domain("t_alpha grid needs at least one point");
    }
    Ok(lemma2_with_grid(ell, &q.params(), grid))
}

/// `R(alpha) = R ln binom(N - L, alpha L) / ln binom(N, L)` for subset coding.
pub fn subset_rate(alpha: f64, n_columns: usize, sections: usize, rate: f64) -> Result<f64> {
    if sections == 0 || sections > n_columns {
        return domain(format!("need 1 <= L <= N, got L = {sections}, N = {n_columns}"));
    }
    let ell = ell_from_alpha(alpha, sections)?;
    if ell > n_columns - sections {
        return domain(format!("alpha L = {ell} exceeds N - L = {}", n_columns - sections));
    }
    let denom = log_binomial_raw(n_columns, sections);
    if denom == 0.0 {
        return domain("ln binom(N, L) is zero");
    }
    Ok(rate * log_binomial_raw(n_columns - sections, ell) / denom)
}

/// Which per-`ell` bound enters the tail sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BoundSelection {
    /// `min(lemma1, lemma2)` per `ell`.
    #[default]
    Minimum,
    Lemma1Only,
    Lemma2Only,
}

impl std::str::FromStr for BoundSelection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" | "minimum" => Ok(Self::Minimum),
            "lemma1" => Ok(Self::Lemma1Only),
            "lemma2" => Ok(Self::Lemma2Only),
            other => Err(Error::Config(format!(
                "unknown bound selection '{other}' (expected min, lemma1 or lemma2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerEll {
    pub ell: usize,
    pub lemma1: f64,
    pub lemma2: f64,
    pub chosen: f64,
    pub t_alpha_opt: f64,
    pub log_lemma1: f64,
    pub lemma2_detail: Lemma2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub per_ell: Vec<PerEll>,
    /// `min(1, sum of chosen)`.
    pub total: f64,
    /// Log of the unclamped sum.
    pub log_total: f64,
    pub selection: BoundSelection,
}

fn per_ell(ell: usize, p: &Params, selection: BoundSelection) -> (PerEll, f64) {
    let l1 = lemma1_log(ell, p);
    let l2 = lemma2_log(ell, p);
    let l2_log = l2.log_value.min(0.0);
    let chosen_log = match selection {
        BoundSelection::Minimum => l1.min(l2_log),
        BoundSelection::Lemma1Only => l1,
        BoundSelection::Lemma2Only => l2_log,
    };
    let row = PerEll {
        ell,
        lemma1: l1.exp(),
        lemma2: l2.probability,
        chosen: chosen_log.exp(),
        t_alpha_opt: l2.t_alpha,
        log_lemma1: l1,
        lemma2_detail: l2,
    };
    (row, chosen_log)
}

pub(crate) fn tail_bound_params(ell0: usize, p: &Params, selection: BoundSelection, exec: Execution) -> TailBound {
    let count = p.sections + 1 - ell0;
    let rows = exec.map_range(count, |i| per_ell(ell0 + i, p, selection));
    let log_total = rows
        .iter()
        .fold(f64::NEG_INFINITY, |acc, (_, lg)| log_add_exp(acc, *lg));
    TailBound {
        per_ell: rows.into_iter().map(|(r, _)| r).collect(),
        total: log_total.min(0.0).exp(),
        log_total,
        selection,
    }
}

/// Sum over `ell = ell0..=L` of the selected per-`ell` bound, clamped to one.
pub fn mistake_tail_bound(ell0: usize, q: &BoundQuery) -> Result<TailBound> {
    mistake_tail_bound_with(ell0, q, BoundSelection::Minimum, Execution::default())
}

pub fn mistake_tail_bound_with(
    ell0: usize,
    q: &BoundQuery,
    selection: BoundSelection,
    exec: Execution,
) -> Result<TailBound> {
    check_ell(ell0, q.code.sections)?;
    Ok(tail_bound_params(ell0, &q.params(), selection, exec))
}

/// Search bracket for [`min_section_size_rate_for_target`].
pub const SECTION_RATE_BRACKET: (f64, f64) = (1e-3, 200.0);

/// Smallest `a` for which every per-`ell` minimum bound with `ell >= alpha0 L`
/// is at most `epsilon`, with `n = a L ln L / R` and `t = 0`.
pub fn min_section_size_rate_for_target(
    v: f64,
    sections: usize,
    rate: f64,
    alpha0: f64,
    epsilon: f64,
) -> Result<f64> {
    min_section_size_rate_for_target_with(v, sections, rate, alpha0, epsilon, Execution::default())
}

pub fn min_section_size_rate_for_target_with(
    v: f64,
    sections: usize,
    rate: f64,
    alpha0: f64,
    epsilon: f64,
    exec: Execution,
) -> Result<f64> {
    capacity(v)?;
    if sections < 2 {
        return domain(format!("need L >= 2, got {sections}"));
    }
    if !(rate > 0.0) {
        return domain(format!("rate must be positive, got {rate}"));
    }
    if !(alpha0 > 0.0 && alpha0 <= 1.0) {
        return domain(format!("alpha0 must lie in (0, 1], got {alpha0}"));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return domain(format!("epsilon must lie in (0, 1], got {epsilon}"));
    }
    let ell0 = ((alpha0 * sections as f64) - 1e-9).ceil().max(1.0) as usize;
    let ln_l = (sections as f64).ln();
    let log_eps = epsilon.ln();
    let feasible = |a: f64| {
        let p = Params {
            v,
            sections,
            n: a * sections as f64 * ln_l / rate,
            rate,
            t: 0.0,
        };
        let worst = exec
            .map_range(sections + 1 - ell0, |i| {
                let ell = ell0 + i;
                lemma1_log(ell, &p).min(lemma2_log(ell, &p).log_value.min(0.0))
            })
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        worst <= log_eps
    };
    let (mut lo, mut hi) = SECTION_RATE_BRACKET;
    if feasible(lo) {
        return Ok(lo);
    }
    if !feasible(hi) {
        return Err(Error::Infeasible(format!(
            "no section size rate up to {hi} meets epsilon = {epsilon} at v = {v}, L = {sections}, R = {rate}"
        )));
    }
    // bisection on ln a
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo - 1.0 < 1e-12 {
            break;
        }
    }
    Ok(hi)
}

/// Points of the inner-rate grid, strictly inside `(0.3 C, C)`.
pub const RATE_GRID_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AchievableRate {
    /// Composite rate `(1 - 2 alpha0) R_inner`, nats.
    pub r_comp: f64,
    pub r_inner: f64,
    pub alpha0: f64,
    pub ell0: usize,
    /// Power of two at least `L^a`.
    pub section_size: usize,
    pub n: f64,
    /// Tail bound on more than `ell0` mistakes at the optimum.
    pub tail_bound: f64,
}

/// Power of two at least `ceil(L^a)`.
pub fn section_size_for(sections: usize, a: f64) -> usize {
    let b = (sections as f64).powf(a).ceil().max(2.0);
    (b as usize).next_power_of_two()
}

/// Best composite rate on the declared `(R, alpha0)` grid with tail bound at most `epsilon`.
pub fn achievable_rate(v: f64, sections: usize, a: f64, epsilon: f64) -> Result<AchievableRate> {
    achievable_rate_with(v, sections, a, epsilon, Execution::default())
}

pub fn achievable_rate_with(
    v: f64,
    sections: usize,
    a: f64,
    epsilon: f64,
    exec: Execution,
) -> Result<AchievableRate> {
    let c = capacity(v)?;
    if sections < 4 {
        return domain(format!("achievable rate search needs L >= 4, got {sections}"));
    }
    if !(a > 0.0) {
        return domain(format!("section size rate must be positive, got {a}"));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return domain(format!("epsilon must lie in (0, 1], got {epsilon}"));
    }
    let section_size = section_size_for(sections, a);
    let log_b = (section_size as f64).ln();
    let rate_at = |k: usize| 0.3 * c + k as f64 * 0.7 * c / (RATE_GRID_POINTS + 1) as f64;
    let max_ell0 = sections / 4;
    let best_per_ell0 = exec.map_range(max_ell0, |i| {
        let ell0 = i + 1;
        let tail = |k: usize| {
            let rate = rate_at(k);
            let p = Params {
                v,
                sections,
                n: sections as f64 * log_b / rate,
                rate,
                t: 0.0,
            };
            tail_bound_params(ell0 + 1, &p, BoundSelection::Minimum, Execution::Sequential).total
        };
        // tail is nondecreasing in R: find the largest feasible grid index
        if tail(1) > epsilon {
            return None;
        }
        let (mut lo, mut hi) = (1usize, RATE_GRID_POINTS + 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if tail(mid) <= epsilon {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r_inner = rate_at(lo);
        let alpha0 = ell0 as f64 / sections as f64;
        Some(AchievableRate {
            r_comp: (1.0 - 2.0 * alpha0) * r_inner,
            r_inner,
            alpha0,
            ell0,
            section_size,
            n: sections as f64 * log_b / r_inner,
            tail_bound: tail(lo),
        })
    });
    Ok(best_per_ell0
        .into_iter()
        .flatten()
        .fold(None, |best: Option<AchievableRate>, cand| match best {
            Some(b) if b.r_comp >= cand.r_comp => Some(b),
            _ => Some(cand),
        })
        .unwrap_or(AchievableRate {
            r_comp: 0.0,
            r_inner: 0.0,
            alpha0: 0.0,
            ell0: 0,
            section_size,
            n: f64::INFINITY,
            tail_bound: 1.0,
        }))
}

/// Channel dispersion `V = (v / 2)(v + 2) / (v + 1)^2`, nats squared.
pub fn dispersion(v: f64) -> f64 {
    0.5 * v * (v + 2.0) / ((v + 1.0) * (v + 1.0))
}

/// Normal approximation `C - sqrt(V / n) Q^{-1}(eps) + ln(n) / (2 n)`.
pub fn ppv_rate(v: f64, n: f64, epsilon: f64) -> Result<f64> {
    let c = capacity(v)?;
    if !(n > 1.0) {
        return domain(format!("blocklength must exceed 1, got {n}"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    Ok(c - (dispersion(v) / n).sqrt() * q_inverse(epsilon) + 0.5 * n.ln() / n)
}
