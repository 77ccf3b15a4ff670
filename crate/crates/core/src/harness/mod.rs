//! Experiment configuration, the Monte Carlo driver, curve generation and
//! single-dictionary reports, as used by the command-line tool.

pub mod config;
pub mod curves;
pub mod demo;
pub mod format;
pub mod monte_carlo;

pub use config::{ExperimentConfig, RateSpec};
pub use curves::{bounds_table, emit_curves, CurveKind, CurveRequest, Fig1Params, Fig2Params, Fig3Params, PpvParams};
pub use demo::{compose_demo, power_check, ComposeDemoReport};
pub use format::{fmt_num, Units};
pub use monte_carlo::{run_monte_carlo, MCReport, TailRow, TrialRecord};
