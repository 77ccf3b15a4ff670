use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use sparc_core::bounds::{section_size_for, BoundQuery, BoundSelection};
use sparc_core::harness::{
    bounds_table, compose_demo, emit_curves, power_check, run_monte_carlo, CurveKind, CurveRequest, ExperimentConfig,
    Fig1Params, Fig2Params, Fig3Params, PpvParams,
};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "sparc", version, about = "Sparse superposition codes on the AWGN channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-ell bound table and mistake tail (defaults: L=100, B=2^13, v=15, R=0.7C)
    Bounds {
        #[command(flatten)]
        common: Common,
        /// First mistake count in the tail (default ceil(alpha0 L))
        #[arg(long)]
        ell0: Option<usize>,
        /// min, lemma1 or lemma2
        #[arg(long, default_value = "min")]
        selection: String,
    },
    /// Figure data as CSV
    Curves {
        #[arg(long)]
        kind: String,
        #[command(flatten)]
        common: Common,
        /// Section counts for fig1 (default 20,30,...,100)
        #[arg(long, value_delimiter = ',')]
        l_list: Option<Vec<usize>>,
        /// SNRs for fig3 (default 2,5,10,20,50,100)
        #[arg(long, value_delimiter = ',')]
        snr_list: Option<Vec<f64>>,
        /// Blocklengths for ppv (default 100,200,...,3000)
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<f64>>,
    },
    /// Monte Carlo run of the exhaustive decoder; per-trial CSV
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Write the JSON summary here (default: stderr)
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Codeword power and column geometry of one dictionary, as JSON
    PowerCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Outer RS code round trip with injected section errors
    ComposeDemo {
        #[command(flatten)]
        common: Common,
        /// Section errors the outer code corrects
        #[arg(long, default_value_t = 1)]
        rs_ell0: usize,
    },
}

#[derive(Args, Default)]
struct Common {
    /// Flat key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long = "L")]
    sections: Option<usize>,
    #[arg(long = "B", conflicts_with = "a")]
    section_size: Option<usize>,
    /// Section size rate; B becomes the power of two at least L^a
    #[arg(long)]
    a: Option<f64>,
    /// Rate in --units
    #[arg(long, conflicts_with = "rate_fraction")]
    rate: Option<f64>,
    #[arg(long)]
    rate_fraction: Option<f64>,
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Threshold t = delta0 / (2 sigma^2), nats
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    noise_var: Option<f64>,
    #[arg(long)]
    signed: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// bits or nats
    #[arg(long)]
    units: Option<String>,
    /// Worker threads; 1 runs sequentially
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    /// Starts from `defaults`, then the config file, then flags.
    fn config(&self, defaults: &[(&str, &str)]) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        for (k, v) in defaults {
            cfg.set(k, v)?;
        }
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_kv_str(&text).with_context(|| format!("in {}", path.display()))?;
        }
        let mut set = |k: &str, v: Option<String>| -> Result<()> {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
            Ok(())
        };
        set("units", self.units.clone())?;
        set("snr", self.snr.map(|x| x.to_string()))?;
        set("L", self.sections.map(|x| x.to_string()))?;
        set("B", self.section_size.map(|x| x.to_string()))?;
        set("rate", self.rate.map(|x| x.to_string()))?;
        set("rate_fraction", self.rate_fraction.map(|x| x.to_string()))?;
        set("epsilon", self.epsilon.map(|x| x.to_string()))?;
        set("noise_var", self.noise_var.map(|x| x.to_string()))?;
        set("seed", self.seed.map(|x| x.to_string()))?;
        set("trials", self.trials.map(|x| x.to_string()))?;
        set("workers", self.workers.map(|x| x.to_string()))?;
        set("out", self.out.as_ref().map(|p| p.display().to_string()))?;
        if self.signed {
            cfg.set("signed", "true")?;
        }
        if let Some(a) = self.a {
            cfg.section_size = section_size_for(cfg.sections, a);
        }
        Ok(cfg)
    }
}

const FIG2_DEFAULTS: [(&str, &str); 4] = [("L", "100"), ("B", "8192"), ("rate_fraction", "0.7"), ("snr", "15")];

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Bounds { common, ell0, selection } => {
            let cfg = common.config(&FIG2_DEFAULTS)?;
            let alpha0 = common.alpha0.unwrap_or(0.1);
            let query = BoundQuery::new(cfg.channel()?, cfg.code()?, common.t.unwrap_or(0.0), alpha0, cfg.epsilon)?;
            let ell0 = ell0.unwrap_or_else(|| query.ell0());
            let selection: BoundSelection = selection.parse()?;
            eprintln!("# {}", cfg.describe()?);
            emit(cfg.output.as_ref(), &bounds_table(&query, ell0, selection, cfg.units, cfg.execution())?)
        }
        Command::Curves {
            kind,
            common,
            l_list,
            snr_list,
            n_list,
        } => {
            let kind: CurveKind = kind.parse()?;
            let cfg = common.config(&FIG2_DEFAULTS)?;
            let epsilon = common.epsilon;
            let req = match kind {
                CurveKind::Fig1Rate => {
                    let mut p = Fig1Params::standard(common.snr.unwrap_or(20.0));
                    if let Some(l) = l_list {
                        p.sections = l;
                    }
                    p.a = common.a;
                    p.epsilon = epsilon.unwrap_or(p.epsilon);
                    CurveRequest::Fig1(p)
                }
                CurveKind::Fig2Exponents => CurveRequest::Fig2(Fig2Params {
                    snr: cfg.snr,
                    code: cfg.code()?,
                    t: common.t.unwrap_or(0.0),
                }),
                CurveKind::Fig3SectionSize => {
                    let mut p = Fig3Params::standard();
                    if let Some(v) = snr_list {
                        p.snrs = v;
                    }
                    p.sections = common.sections.unwrap_or(p.sections);
                    p.rate_fraction = common.rate_fraction.unwrap_or(p.rate_fraction);
                    p.alpha0 = common.alpha0.unwrap_or(p.alpha0);
                    p.epsilon = epsilon.unwrap_or(p.epsilon);
                    CurveRequest::Fig3(p)
                }
                CurveKind::Ppv => CurveRequest::Ppv(PpvParams {
                    snr: common.snr.unwrap_or(15.0),
                    lengths: n_list.unwrap_or_else(|| (1..=30).map(|k| 100.0 * k as f64).collect()),
                    epsilon: epsilon.unwrap_or(1e-3),
                }),
            };
            emit(cfg.output.as_ref(), &emit_curves(&req, cfg.execution())?)
        }
        Command::Simulate { common, summary } => {
            let cfg = common.config(&[])?;
            let report = run_monte_carlo(&cfg)?;
            emit(cfg.output.as_ref(), &report.trials_csv()?)?;
            let json = report.summary_json()?;
            match summary {
                Some(path) => std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?,
                None => eprintln!("{json}"),
            }
            Ok(())
        }
        Command::PowerCheck { common } => {
            let cfg = common.config(&[])?;
            let report = power_check(&cfg)?;
            emit(cfg.output.as_ref(), &(serde_json::to_string_pretty(&report)? + "\n"))
        }
        Command::ComposeDemo { common, rs_ell0 } => {
            let mut cfg = common.config(&[("noise_var", "0")])?;
            cfg.set("rs_ell0", &rs_ell0.to_string())?;
            let report = compose_demo(&cfg)?;
            eprintln!(
                "# n_out={} K_out={} d_RS={} R_inner={} R_out={} R_comp={} (nats), channel mistakes {}",
                report.n_out,
                report.k_out,
                report.distance,
                report.inner_rate,
                report.outer_rate,
                report.composite_rate,
                report.channel_mistakes
            );
            emit(cfg.output.as_ref(), &report.to_csv()?)
        }
    }
}
