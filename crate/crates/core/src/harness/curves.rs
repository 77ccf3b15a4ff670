//! CSV curve generators and the per-`ell` bounds table.

use super::format::{fmt_num, write_csv, Units};
use crate::bounds::{achievable_rate_with, min_section_size_rate_for_target_with, ppv_rate, tail_bound_params, BoundQuery, BoundSelection, Params};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rate::{capacity, d_n_alpha_raw, section_size_rate_finite_with, section_size_rate_limit, CodeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Fig1Rate,
    Fig2Exponents,
    Fig3SectionSize,
    Ppv,
}

impl std::str::FromStr for CurveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" | "fig1_rate" => Ok(Self::Fig1Rate),
            "fig2" | "fig2_exponents" => Ok(Self::Fig2Exponents),
            "fig3" | "fig3_section_size" => Ok(Self::Fig3SectionSize),
            "ppv" => Ok(Self::Ppv),
            other => Err(Error::Config(format!(
                "unknown curve kind '{other}' (expected fig1, fig2, fig3 or ppv)"
            ))),
        }
    }
}

/// Composite achievable rate against `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Params {
    pub snr: f64,
    pub sections: Vec<usize>,
    /// Section size rate; `None` uses the limit `a_v` at `R = C`.
    pub a: Option<f64>,
    pub epsilon: f64,
}

impl Fig1Params {
    pub fn standard(snr: f64) -> Self {
        Self {
            snr,
            sections: (20..=100).step_by(10).collect(),
            a: None,
            epsilon: 1e-4,
        }
    }
}

/// Per-`ell` exponents at one code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig2Params {
    pub snr: f64,
    pub code: CodeSpec,
    pub t: f64,
}

/// Section size rates against `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Params {
    pub snrs: Vec<f64>,
    pub sections: usize,
    /// Rate fraction for the target curve; `a_v` and `a_{v,L}` use `R = C`.
    pub rate_fraction: f64,
    pub alpha0: f64,
    pub epsilon: f64,
}

impl Fig3Params {
    pub fn standard() -> Self {
        Self {
            snrs: vec![2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            sections: 64,
            rate_fraction: 0.8,
            alpha0: 0.1,
            epsilon: (-10f64).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpvParams {
    pub snr: f64,
    pub lengths: Vec<f64>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveRequest {
    Fig1(Fig1Params),
    Fig2(Fig2Params),
    Fig3(Fig3Params),
    Ppv(PpvParams),
}

impl CurveRequest {
    pub fn kind(&self) -> CurveKind {
        match self {
            CurveRequest::Fig1(_) => CurveKind::Fig1Rate,
            CurveRequest::Fig2(_) => CurveKind::Fig2Exponents,
            CurveRequest::Fig3(_) => CurveKind::Fig3SectionSize,
            CurveRequest::Ppv(_) => CurveKind::Ppv,
        }
    }
}

/// CSV text for the requested curve, rows in sweep order.
pub fn emit_curves(req: &CurveRequest, exec: Execution) -> Result<String> {
    match req {
        CurveRequest::Fig1(p) => fig1(p, exec),
        CurveRequest::Fig2(p) => fig2(p, exec),
        CurveRequest::Fig3(p) => fig3(p, exec),
        CurveRequest::Ppv(p) => ppv(p),
    }
}

fn bits(x: f64) -> f64 {
    Units::Bits.from_nats(x)
}

fn fig1(p: &Fig1Params, exec: Execution) -> Result<String> {
    let c = capacity(p.snr)?;
    let a = match p.a {
        Some(a) => a,
        None => section_size_rate_limit(p.snr, c)?,
    };
    let mut rows = Vec::with_capacity(p.sections.len());
    for &l in &p.sections {
        let r = achievable_rate_with(p.snr, l, a, p.epsilon, exec)?;
        let ppv = if r.n.is_finite() {
            fmt_num(bits(ppv_rate(p.snr, r.n, p.epsilon)?))
        } else {
            "NaN".to_string()
        };
        rows.push(vec![
            fmt_num(p.snr),
            l.to_string(),
            r.section_size.to_string(),
            fmt_num(a),
            fmt_num(r.n),
            fmt_num(bits(r.r_inner)),
            fmt_num(r.alpha0),
            fmt_num(bits(r.r_comp)),
            ppv,
            fmt_num(r.tail_bound),
        ]);
    }
    write_csv(
        &["v", "L", "B", "a", "n", "R_inner_bits", "alpha0", "R_comp_bits", "ppv_bits", "tail_bound"],
        &rows,
    )
}

fn fig2(p: &Fig2Params, exec: Execution) -> Result<String> {
    let code = p.code;
    let params = Params {
        v: p.snr,
        sections: code.sections,
        n: code.n_real(),
        rate: code.rate,
        t: p.t,
    };
    let tb = tail_bound_params(1, &params, BoundSelection::Minimum, exec);
    let l = code.sections;
    let rows = tb
        .per_ell
        .iter()
        .map(|row| {
            let d = if row.ell == l { 0.0 } else { d_n_alpha_raw(row.ell, l, params.n, p.snr) };
            vec![
                fmt_num(row.ell as f64 / l as f64),
                row.ell.to_string(),
                fmt_num(-row.lemma2_detail.log_main),
                fmt_num(-row.lemma2_detail.log_star),
                fmt_num(-row.log_lemma1),
                fmt_num(d),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(
        &["alpha", "ell", "neg_ln_lemma2_main", "neg_ln_lemma2_star", "neg_ln_lemma1", "d_n_alpha"],
        &rows,
    )
}

fn fig3(p: &Fig3Params, exec: Execution) -> Result<String> {
    let mut rows = Vec::with_capacity(p.snrs.len());
    for &v in &p.snrs {
        let c = capacity(v)?;
        let a_v = section_size_rate_limit(v, c)?;
        let a_vl = section_size_rate_finite_with(v, p.sections, c, exec)?.value;
        let target = match min_section_size_rate_for_target_with(v, p.sections, p.rate_fraction * c, p.alpha0, p.epsilon, exec) {
            Ok(a) => fmt_num(a),
            Err(Error::Infeasible(_)) => "inf".to_string(),
            Err(e) => return Err(e),
        };
        rows.push(vec![
            fmt_num(v),
            p.sections.to_string(),
            fmt_num(p.rate_fraction),
            fmt_num(a_v),
            fmt_num(a_vl),
            target,
            fmt_num(p.alpha0),
            fmt_num(p.epsilon),
        ]);
    }
    write_csv(&["v", "L", "R_fraction", "a_v", "a_vL", "a_target", "alpha0", "epsilon"], &rows)
}

fn ppv(p: &PpvParams) -> Result<String> {
    let c = capacity(p.snr)?;
    let rows = p
        .lengths
        .iter()
        .map(|&n| {
            Ok(vec![
                fmt_num(p.snr),
                fmt_num(n),
                fmt_num(p.epsilon),
                fmt_num(bits(c)),
                fmt_num(bits(ppv_rate(p.snr, n, p.epsilon)?)),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(&["v", "n", "epsilon", "C_bits", "ppv_bits"], &rows)
}

/// Per-`ell` single-term, two-term and selected bounds from `ell0` on, with
/// the clamped tail sum from each `ell`. Rate columns are in `units`.
pub fn bounds_table(q: &BoundQuery, ell0: usize, selection: BoundSelection, units: Units, exec: Execution) -> Result<String> {
    let tb = crate::bounds::mistake_tail_bound_with(ell0, q, selection, exec)?;
    let l = q.code.sections;
    let rate_col = format!("R_{}", units.suffix());
    // suffix sums of the chosen bounds, in log space
    let mut tail_from = vec![f64::NEG_INFINITY; tb.per_ell.len() + 1];
    for (i, row) in tb.per_ell.iter().enumerate().rev() {
        tail_from[i] = crate::numeric::log_add_exp(tail_from[i + 1], row.chosen.ln());
    }
    let rows = tb
        .per_ell
        .iter()
        .enumerate()
        .map(|(i, row)| {
            vec![
                fmt_num(q.channel.snr()),
                l.to_string(),
                q.code.section_size.to_string(),
                fmt_num(units.from_nats(q.code.rate)),
                fmt_num(q.code.n_real()),
                fmt_num(q.t),
                row.ell.to_string(),
                fmt_num(row.ell as f64 / l as f64),
                fmt_num(row.lemma1),
                fmt_num(row.lemma2),
                fmt_num(row.chosen),
                fmt_num(row.t_alpha_opt),
                fmt_num(tail_from[i].min(0.0).exp()),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(
        &["v", "L", "B", &rate_col, "n", "t", "ell", "alpha", "lemma1", "lemma2", "chosen", "t_alpha", "tail_bound"],
        &rows,
    )
}
