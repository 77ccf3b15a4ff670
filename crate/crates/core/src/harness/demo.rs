//! Single-dictionary reports: the power check and the outer-code round trip.

use super::config::ExperimentConfig;
use super::format::{fmt_num, write_csv};
use crate::codec::rng::{stream, StreamId};
use crate::codec::{awgn_channel, count_mistakes, decode_exhaustive_with, generate_dictionary_with_power, synthesize, DecodeOptions};
use crate::diagnostics::{power_report, PowerReport};
use crate::error::{Error, Result};
use crate::outer::compose::composite_message_bits;
use crate::outer::{compose_decode, compose_encode, outer_rate};
use rand_core::RngCore;
use serde::{Deserialize, Serialize};

/// Diagnostics of the dictionary drawn from `master_seed`.
pub fn power_check(cfg: &ExperimentConfig) -> Result<PowerReport> {
    let channel = cfg.channel()?;
    let code = cfg.code()?;
    let dict = generate_dictionary_with_power(&code, cfg.design_power.unwrap_or(channel.power), cfg.master_seed)?;
    power_report(&dict, &code, &channel, cfg.epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionRow {
    pub injected: usize,
    /// Inner mistakes after injection.
    pub mistakes: usize,
    pub block_ok: bool,
    pub bits_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposeDemoReport {
    pub n_out: usize,
    pub k_out: usize,
    pub distance: usize,
    pub correctable: usize,
    pub inner_rate: f64,
    pub outer_rate: f64,
    pub composite_rate: f64,
    /// Inner mistakes from the channel alone.
    pub channel_mistakes: usize,
    pub rows: Vec<InjectionRow>,
}

impl ComposeDemoReport {
    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    self.n_out.to_string(),
                    self.k_out.to_string(),
                    self.distance.to_string(),
                    self.correctable.to_string(),
                    r.injected.to_string(),
                    r.mistakes.to_string(),
                    r.block_ok.to_string(),
                    r.bits_ok.to_string(),
                    fmt_num(self.composite_rate),
                ]
            })
            .collect();
        write_csv(
            &["n_out", "K_out", "d_RS", "t_RS", "injected", "mistakes", "block_ok", "bits_ok", "R_comp_nats"],
            &rows,
        )
    }
}

/// Encodes random bits through the outer and inner codes, decodes the channel
/// output, then adds `0..=t_RS + 1` further section mistakes to the inner
/// decoder output and records whether the outer decoder recovers the bits.
pub fn compose_demo(cfg: &ExperimentConfig) -> Result<ComposeDemoReport> {
    cfg.validate()?;
    let rs = cfg
        .rs()?
        .ok_or_else(|| Error::Config("compose-demo needs rs_ell0".into()))?;
    let channel = cfg.channel()?;
    let code = cfg.code()?;
    let seed = cfg.master_seed;
    let dict = generate_dictionary_with_power(&code, cfg.design_power.unwrap_or(channel.power), seed)?;
    let mut rng = stream(seed, StreamId::Message);
    let bits: Vec<bool> = (0..composite_message_bits(&rs)).map(|_| rng.next_u64() >> 63 == 1).collect();
    let beta = compose_encode(&bits, &code, &rs)?;
    let y = awgn_channel(&synthesize(&dict, &beta)?, cfg.noise_var, seed)?;
    let opts = DecodeOptions {
        delta0: cfg.delta0,
        cap: cfg.cap,
        early_exit_reference: None,
        exec: cfg.execution(),
    };
    let decoded = decode_exhaustive_with(&dict, &y, &code, &opts)?.coefficients;
    let channel_mistakes = count_mistakes(&decoded, &beta)?;
    let clean_sections: Vec<usize> = (0..code.sections)
        .filter(|&i| decoded.indices[i] == beta.indices[i])
        .collect();
    let mut rows = Vec::new();
    for injected in 0..=(rs.correctable() + 1).min(clean_sections.len()) {
        let mut hit = decoded.clone();
        for &i in &clean_sections[..injected] {
            hit.indices[i] = (hit.indices[i] + 1) % code.section_size;
        }
        let out = compose_decode(&hit, &code, &rs)?;
        rows.push(InjectionRow {
            injected,
            mistakes: count_mistakes(&hit, &beta)?,
            block_ok: out.block_ok,
            bits_ok: out.bits == bits,
        });
    }
    Ok(ComposeDemoReport {
        n_out: rs.n_out(),
        k_out: rs.k_out(),
        distance: rs.distance(),
        correctable: rs.correctable(),
        inner_rate: code.rate,
        outer_rate: outer_rate(&rs),
        composite_rate: code.rate * outer_rate(&rs),
        channel_mistakes,
        rows,
    })
}
