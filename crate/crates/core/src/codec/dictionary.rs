use super::rng::{standard_normal, stream, StreamId};
use crate::error::{domain, Result};
use crate::rate::{ChannelSpec, CodeSpec};

/// `n x (L B)` design matrix, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    rows: usize,
    sections: usize,
    section_size: usize,
    entry_variance: f64,
    seed: Option<u64>,
    data: Vec<f64>,
}

/// I.i.d. `N(0, P/L)` entries with `n = n_int` rows, drawn column by column.
pub fn generate_dictionary(code: &CodeSpec, channel: &ChannelSpec, seed: u64) -> Result<Dictionary> {
    Dictionary::gaussian(code.n_int(), code.sections, code.section_size, channel.power / code.sections as f64, seed)
}

/// Same layout with entries of variance `P'/L` for a design power `P'` (e.g. below `P`).
pub fn generate_dictionary_with_power(code: &CodeSpec, design_power: f64, seed: u64) -> Result<Dictionary> {
    Dictionary::gaussian(code.n_int(), code.sections, code.section_size, design_power / code.sections as f64, seed)
}

impl Dictionary {
    pub fn gaussian(rows: usize, sections: usize, section_size: usize, entry_variance: f64, seed: u64) -> Result<Self> {
        if rows == 0 || sections == 0 || section_size == 0 {
            return domain(format!(
                "dictionary needs positive dimensions, got n={rows}, L={sections}, B={section_size}"
            ));
        }
        if !(entry_variance > 0.0) {
            return domain(format!("entry variance must be positive, got {entry_variance}"));
        }
        let sd = entry_variance.sqrt();
        let mut rng = stream(seed, StreamId::Dictionary);
        let len = rows * sections * section_size;
        let data = (0..len).map(|_| sd * standard_normal(&mut rng)).collect();
        Ok(Self {
            rows,
            sections,
            section_size,
            entry_variance,
            seed: Some(seed),
            data,
        })
    }

    /// Dictionary from explicit columns, e.g. a structured toy design.
    pub fn from_columns(
        sections: usize,
        section_size: usize,
        entry_variance: f64,
        columns: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if columns.len() != sections * section_size || columns.is_empty() {
            return domain(format!(
                "expected {} columns, got {}",
                sections * section_size,
                columns.len()
            ));
        }
        let rows = columns[0].len();
        if rows == 0 || columns.iter().any(|c| c.len() != rows) {
            return domain("columns must share a positive length");
        }
        Ok(Self {
            rows,
            sections,
            section_size,
            entry_variance,
            seed: None,
            data: columns.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn sections(&self) -> usize {
        self.sections
    }

    pub fn section_size(&self) -> usize {
        self.section_size
    }

    pub fn columns(&self) -> usize {
        self.sections * self.section_size
    }

    pub fn entry_variance(&self) -> f64 {
        self.entry_variance
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Column of entry `index` in `section`.
    pub fn section_column(&self, section: usize, index: usize) -> &[f64] {
        self.column(section * self.section_size + index)
    }

    pub fn as_column_major(&self) -> &[f64] {
        &self.data
    }
}
