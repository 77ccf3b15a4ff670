//! Experiment configuration: a flat `key = value` text format, one key per
//! line, `#` starting a comment. Command-line flags apply on top through
//! [`ExperimentConfig::set`].
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `snr` | `v = P / sigma^2` | 15 |
//! | `noise_var` | `sigma^2` (0 for a noiseless channel) | 1 |
//! | `L` | sections | 4 |
//! | `B` | section size | 16 |
//! | `signed` | `true`/`false` | false |
//! | `rate` | rate in `units` | unset |
//! | `rate_fraction` | rate as a fraction of capacity | 0.6 |
//! | `units` | `bits` or `nats` | bits |
//! | `seed` | master seed | 1 |
//! | `trials` | Monte Carlo trials | 1000 |
//! | `ell0` | comma-separated mistake thresholds | 1..=L |
//! | `delta0` | decoder tolerance | 0 |
//! | `epsilon` | diagnostic probability level | 0.01 |
//! | `design_power` | dictionary power `P'` | `P` |
//! | `rs_ell0` | outer RS code correcting this many section errors | none |
//! | `cap` | enumeration cap | 20000000 |
//! | `workers` | worker threads (1 = sequential) | all cores |
//! | `out` | output path | stdout |
//!
//! `rate` and `rate_fraction` are alternatives; whichever is set last wins.

use super::format::Units;
use crate::codec::decode::{candidate_count, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::outer::RSSpec;
use crate::par::Execution;
use crate::rate::{ChannelSpec, CodeSpec};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateSpec {
    /// In the configured units.
    Absolute(f64),
    FractionOfCapacity(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub snr: f64,
    pub noise_var: f64,
    pub sections: usize,
    pub section_size: usize,
    pub signed: bool,
    pub rate: RateSpec,
    pub units: Units,
    pub master_seed: u64,
    pub trials: u64,
    pub ell0: Option<Vec<usize>>,
    pub delta0: f64,
    pub epsilon: f64,
    pub design_power: Option<f64>,
    pub rs_ell0: Option<usize>,
    pub cap: u64,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            snr: 15.0,
            noise_var: 1.0,
            sections: 4,
            section_size: 16,
            signed: false,
            rate: RateSpec::FractionOfCapacity(0.6),
            units: Units::Bits,
            master_seed: 1,
            trials: 1000,
            ell0: None,
            delta0: 0.0,
            epsilon: 0.01,
            design_power: None,
            rs_ell0: None,
            cap: DEFAULT_ENUMERATION_CAP,
            workers: None,
            output: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for key '{key}'")))
}

impl ExperimentConfig {
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_kv_str(text)?;
        Ok(cfg)
    }

    /// Applies every `key = value` line of `text` on top of the current values.
    pub fn apply_kv_str(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_kv_str(&std::fs::read_to_string(path)?)
    }

    /// Sets one key, as in the file format.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "snr" => self.snr = parse(key, value)?,
            "noise_var" => self.noise_var = parse(key, value)?,
            "L" => self.sections = parse(key, value)?,
            "B" => self.section_size = parse(key, value)?,
            "signed" => self.signed = parse(key, value)?,
            "rate" => self.rate = RateSpec::Absolute(parse(key, value)?),
            "rate_fraction" => self.rate = RateSpec::FractionOfCapacity(parse(key, value)?),
            "units" => self.units = value.parse()?,
            "seed" => self.master_seed = parse(key, value)?,
            "trials" => self.trials = parse(key, value)?,
            "ell0" => {
                self.ell0 = Some(
                    value
                        .split(',')
                        .map(|s| parse(key, s.trim()))
                        .collect::<Result<Vec<usize>>>()?,
                )
            }
            "delta0" => self.delta0 = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "design_power" => self.design_power = Some(parse(key, value)?),
            "rs_ell0" => self.rs_ell0 = Some(parse(key, value)?),
            "cap" => self.cap = parse(key, value)?,
            "workers" => self.workers = Some(parse(key, value)?),
            "out" => self.output = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Channel with `P = v sigma^2`; a noiseless config keeps `P = v`.
    pub fn channel(&self) -> Result<ChannelSpec> {
        let sigma2 = if self.noise_var > 0.0 { self.noise_var } else { 1.0 };
        ChannelSpec::new(self.snr * sigma2, sigma2)
    }

    pub fn rate_nats(&self) -> Result<f64> {
        Ok(match self.rate {
            RateSpec::Absolute(r) => self.units.to_nats(r),
            RateSpec::FractionOfCapacity(f) => f * self.channel()?.capacity(),
        })
    }

    pub fn code(&self) -> Result<CodeSpec> {
        CodeSpec::new(self.sections, self.section_size, self.signed, self.rate_nats()?)
    }

    /// Outer code of length `L` over `GF(B)`, when configured.
    pub fn rs(&self) -> Result<Option<RSSpec>> {
        let Some(ell0) = self.rs_ell0 else {
            return Ok(None);
        };
        if !self.section_size.is_power_of_two() {
            return Err(Error::Config(format!(
                "an outer RS code needs B a power of two, got {}",
                self.section_size
            )));
        }
        let m = self.section_size.trailing_zeros();
        Ok(Some(RSSpec::for_sections(m, self.sections, ell0).map_err(|e| Error::Config(e.to_string()))?))
    }

    /// Thresholds reported in the Monte Carlo summary.
    pub fn ell0_list(&self) -> Vec<usize> {
        self.ell0.clone().unwrap_or_else(|| (1..=self.sections).collect())
    }

    pub fn execution(&self) -> Execution {
        match self.workers {
            Some(w) => Execution::with_workers(w),
            None => Execution::default(),
        }
    }

    /// Checks everything that would otherwise fail mid-run.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.noise_var >= 0.0) {
            return Err(Error::Config(format!("noise_var must be nonnegative, got {}", self.noise_var)));
        }
        if !(self.delta0 >= 0.0) {
            return Err(Error::Config(format!("delta0 must be nonnegative, got {}", self.delta0)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if let Some(p) = self.design_power {
            if !(p > 0.0) {
                return Err(Error::Config(format!("design_power must be positive, got {p}")));
            }
        }
        let code = self.code()?;
        let candidates = candidate_count(&code);
        if candidates > self.cap as f64 {
            return Err(Error::EnumerationCap {
                candidates,
                cap: self.cap,
            });
        }
        if let Some(&bad) = self.ell0_list().iter().find(|&&l| l == 0 || l > self.sections) {
            return Err(Error::Config(format!("ell0 = {bad} outside 1..={}", self.sections)));
        }
        if self.rs()?.is_some() && self.signed {
            return Err(Error::Config("an outer RS code needs an unsigned inner code".into()));
        }
        Ok(())
    }

    /// One-line description of the resolved parameters.
    pub fn describe(&self) -> Result<String> {
        let code = self.code()?;
        Ok(format!(
            "v={} sigma2={} L={} B={} signed={} R={} nats ({} {}) n_real={} n={} seed={} trials={}",
            self.snr,
            self.noise_var,
            code.sections,
            code.section_size,
            code.signed,
            code.rate,
            self.units.from_nats(code.rate),
            self.units.suffix(),
            code.n_real(),
            code.n_int(),
            self.master_seed,
            self.trials
        ))
    }
}
