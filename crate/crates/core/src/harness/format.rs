//! CSV number formatting and unit conversion at the I/O boundary.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Nonzero magnitudes below this are written in scientific notation.
pub const SCIENTIFIC_BELOW: f64 = 1e-4;

/// Shortest round-trip decimal, or scientific notation for `0 < |x| < 1e-4`.
pub fn fmt_num(x: f64) -> String {
    if x != 0.0 && x.abs() < SCIENTIFIC_BELOW {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Units {
    #[default]
    Bits,
    Nats,
}

impl Units {
    pub fn from_nats(self, x: f64) -> f64 {
        match self {
            Units::Bits => x / std::f64::consts::LN_2,
            Units::Nats => x,
        }
    }

    pub fn to_nats(self, x: f64) -> f64 {
        match self {
            Units::Bits => x * std::f64::consts::LN_2,
            Units::Nats => x,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Units::Bits => "bits",
            Units::Nats => "nats",
        }
    }
}

impl std::str::FromStr for Units {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bits" => Ok(Units::Bits),
            "nats" => Ok(Units::Nats),
            other => Err(Error::Config(format!("unknown units '{other}' (expected bits or nats)"))),
        }
    }
}

/// Writes a header and rows of preformatted fields.
pub(crate) fn write_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}
