//! Seeded Monte Carlo runs of the exhaustive decoder against the analytic tail bound.
//!
//! Trial `i` draws its dictionary, message and noise from
//! `trial_seed(master_seed, i)`, so each trial is a fresh draw from the
//! code ensemble that the bounds average over, and results do not depend on
//! how trials are scheduled.

use super::config::ExperimentConfig;
use super::format::{fmt_num, write_csv};
use crate::bounds::{mistake_tail_bound_with, BoundQuery, BoundSelection};
use crate::codec::rng::{stream, trial_seed, StreamId};
use crate::codec::{
    awgn_channel, count_mistakes, decode_exhaustive_with, generate_dictionary_with_power, random_coefficients,
    synthesize, DecodeOptions,
};
use crate::diagnostics::{power_report, PowerReport};
use crate::error::Result;
use crate::outer::{compose_decode, compose_encode};
use crate::par::Execution;
use crate::stats::{normal_half_width, wilson_interval, Interval};
use rand_core::RngCore;
use serde::{Deserialize, Serialize};

/// Confidence level of the reported intervals.
pub const CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub mistakes: usize,
    pub section_error_rate: f64,
    /// Exact recovery of the message bits (through the outer code when configured).
    pub block_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub ell0: usize,
    /// Trials with at least `ell0` mistakes.
    pub count: u64,
    pub empirical: f64,
    pub wilson: Interval,
    pub half_width: f64,
    pub analytic: f64,
    /// `empirical <= analytic + half_width`.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub description: String,
    pub n_real: f64,
    pub n_int: usize,
    /// Threshold `delta0 / (2 sigma^2)` used in the analytic bounds.
    pub t: f64,
    pub trials: Vec<TrialRecord>,
    pub tails: Vec<TailRow>,
    pub block_errors: u64,
    pub block_error_rate: f64,
    pub block_error_wilson: Interval,
    /// Diagnostics of the first trial's dictionary.
    pub power: PowerReport,
}

impl MCReport {
    /// `trial,seed,mistakes,section_error_rate,block_ok`.
    pub fn trials_csv(&self) -> Result<String> {
        let rows: Vec<Vec<String>> = self
            .trials
            .iter()
            .map(|t| {
                vec![
                    t.trial.to_string(),
                    t.seed.to_string(),
                    t.mistakes.to_string(),
                    fmt_num(t.section_error_rate),
                    t.block_ok.to_string(),
                ]
            })
            .collect();
        write_csv(&["trial", "seed", "mistakes", "section_error_rate", "block_ok"], &rows)
    }

    pub fn summary_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Summary<'a> {
            description: &'a str,
            n_real: f64,
            n_int: usize,
            t: f64,
            tails: &'a [TailRow],
            block_errors: u64,
            block_error_rate: f64,
            block_error_wilson: Interval,
            power: &'a PowerReport,
        }
        serde_json::to_string_pretty(&Summary {
            description: &self.description,
            n_real: self.n_real,
            n_int: self.n_int,
            t: self.t,
            tails: &self.tails,
            block_errors: self.block_errors,
            block_error_rate: self.block_error_rate,
            block_error_wilson: self.block_error_wilson,
            power: &self.power,
        })
        .map_err(|e| crate::Error::Io(e.to_string()))
    }
}

pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<MCReport> {
    cfg.validate()?;
    let channel = cfg.channel()?;
    let code = cfg.code()?;
    let rs = cfg.rs()?;
    let exec = cfg.execution();
    let design_power = cfg.design_power.unwrap_or(channel.power);
    let sigma2 = cfg.noise_var;
    let decode_opts = DecodeOptions {
        delta0: cfg.delta0,
        cap: cfg.cap,
        early_exit_reference: None,
        exec: Execution::Sequential,
    };

    let run_trial = |i: usize| -> Result<TrialRecord> {
        let seed = trial_seed(cfg.master_seed, i as u64);
        let dict = generate_dictionary_with_power(&code, design_power, seed)?;
        let mut rng = stream(seed, StreamId::Message);
        let (beta, bits) = match &rs {
            Some(rs) => {
                let k = crate::outer::compose::composite_message_bits(rs);
                let bits: Vec<bool> = (0..k).map(|_| rng.next_u64() >> 63 == 1).collect();
                (compose_encode(&bits, &code, rs)?, Some(bits))
            }
            None => (random_coefficients(&code, &mut rng), None),
        };
        let y = awgn_channel(&synthesize(&dict, &beta)?, sigma2, seed)?;
        let decoded = decode_exhaustive_with(&dict, &y, &code, &decode_opts)?;
        let mistakes = count_mistakes(&decoded.coefficients, &beta)?;
        let block_ok = match (&rs, bits) {
            (Some(rs), Some(bits)) => compose_decode(&decoded.coefficients, &code, rs)?.bits == bits,
            _ => mistakes == 0,
        };
        Ok(TrialRecord {
            trial: i as u64,
            seed,
            mistakes,
            section_error_rate: mistakes as f64 / code.sections as f64,
            block_ok,
        })
    };
    let trials = exec
        .map_range(cfg.trials as usize, run_trial)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let t = cfg.delta0 / (2.0 * channel.noise_var);
    let n_trials = cfg.trials;
    let mut tails = Vec::new();
    for ell0 in cfg.ell0_list() {
        let alpha0 = ell0 as f64 / code.sections as f64;
        let query = BoundQuery::new(channel, code, t, alpha0, cfg.epsilon)?;
        let analytic = mistake_tail_bound_with(ell0, &query, BoundSelection::Minimum, exec)?.total;
        let count = trials.iter().filter(|r| r.mistakes >= ell0).count() as u64;
        let empirical = count as f64 / n_trials as f64;
        let half_width = normal_half_width(empirical, n_trials, CONFIDENCE);
        tails.push(TailRow {
            ell0,
            count,
            empirical,
            wilson: wilson_interval(count, n_trials, CONFIDENCE),
            half_width,
            analytic,
            consistent: empirical <= analytic + half_width,
        });
    }
    let block_errors = trials.iter().filter(|r| !r.block_ok).count() as u64;
    let first_dict = generate_dictionary_with_power(&code, design_power, trial_seed(cfg.master_seed, 0))?;
    Ok(MCReport {
        description: cfg.describe()?,
        n_real: code.n_real(),
        n_int: code.n_int(),
        t,
        trials,
        tails,
        block_errors,
        block_error_rate: block_errors as f64 / n_trials as f64,
        block_error_wilson: wilson_interval(block_errors, n_trials, CONFIDENCE),
        power: power_report(&first_dict, &code, &channel, cfg.epsilon)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: &str) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.set("L", "3").unwrap();
        cfg.set("B", "4").unwrap();
        cfg.set("trials", trials).unwrap();
        cfg
    }

    #[test]
    fn noiseless_runs_are_clean() {
        let mut cfg = small("20");
        cfg.set("noise_var", "0").unwrap();
        let r = run_monte_carlo(&cfg).unwrap();
        assert!(r.trials.iter().all(|t| t.mistakes == 0 && t.block_ok));
        assert_eq!(r.block_errors, 0);
        assert!(r.tails.iter().all(|t| t.count == 0));
    }

    #[test]
    fn schedule_does_not_change_results() {
        let mut a = small("40");
        a.set("workers", "1").unwrap();
        let mut b = small("40");
        b.set("workers", "4").unwrap();
        let ra = run_monte_carlo(&a).unwrap();
        let rb = run_monte_carlo(&b).unwrap();
        assert_eq!(ra.trials_csv().unwrap(), rb.trials_csv().unwrap());
        assert_eq!(ra.summary_json().unwrap(), rb.summary_json().unwrap());
    }

    #[test]
    fn analytic_column_matches_direct_call() {
        let cfg = small("5");
        let r = run_monte_carlo(&cfg).unwrap();
        let ch = cfg.channel().unwrap();
        let code = cfg.code().unwrap();
        for row in &r.tails {
            let q = BoundQuery::new(ch, code, 0.0, row.ell0 as f64 / 3.0, cfg.epsilon).unwrap();
            let direct = crate::bounds::mistake_tail_bound(row.ell0, &q).unwrap().total;
            assert_eq!(row.analytic, direct);
            assert!(row.wilson.lo <= row.empirical && row.empirical <= row.wilson.hi);
        }
    }

    #[test]
    fn outer_code_runs() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("L", "3").unwrap();
        cfg.set("B", "4").unwrap();
        cfg.set("rs_ell0", "1").unwrap();
        cfg.set("trials", "30").unwrap();
        cfg.set("rate_fraction", "0.3").unwrap();
        let r = run_monte_carlo(&cfg).unwrap();
        // one section mistake is always corrected
        assert!(r.trials.iter().filter(|t| t.mistakes <= 1).all(|t| t.block_ok));
    }

    #[test]
    fn csv_header() {
        let r = run_monte_carlo(&small("2")).unwrap();
        let csv = r.trials_csv().unwrap();
        assert!(csv.starts_with("trial,seed,mistakes,section_error_rate,block_ok\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
