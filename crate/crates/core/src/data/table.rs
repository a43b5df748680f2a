use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Vocab;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub vocab: Vocab,
}

/// An immutable M×n matrix of vocab indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    name: String,
    columns: Vec<Column>,
    rows: Vec<u32>,
    n_rows: usize,
}

impl Table {
    /// Wraps already-encoded rows (row-major), checking every cell against
    /// its column's vocab.
    pub fn new(name: impl Into<String>, columns: Vec<Column>, rows: Vec<u32>) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(Error::InvalidSpec("table needs at least one column".into()));
        }
        if rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        if !rows.len().is_multiple_of(n) {
            return Err(Error::ShapeMismatch {
                context: "table rows",
                expected: (rows.len() / n + 1) * n,
                found: rows.len(),
            });
        }
        for (i, &v) in rows.iter().enumerate() {
            let col = &columns[i % n];
            if v as usize >= col.vocab.size() {
                return Err(Error::IndexOutOfRange {
                    column: col.name.clone(),
                    index: v,
                    limit: col.vocab.size() as u32,
                });
            }
        }
        let n_rows = rows.len() / n;
        Ok(Table { name: name.into(), columns, rows, n_rows })
    }

    /// Builds vocabs in one scan over `raw_rows` and encodes them.
    pub fn from_raw_rows<S: AsRef<str>>(
        name: impl Into<String>,
        column_names: &[S],
        raw_rows: &[Vec<String>],
    ) -> Result<Self> {
        let n = column_names.len();
        if raw_rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        let mut distinct: Vec<BTreeSet<&str>> = (0..n).map(|_| BTreeSet::new()).collect();
        for (r, row) in raw_rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSpec(alloc::format!("row {r} has {} fields, expected {n}", row.len())));
            }
            for (set, v) in distinct.iter_mut().zip(row) {
                set.insert(v.as_str());
            }
        }
        let columns: Vec<Column> = column_names
            .iter()
            .zip(distinct)
            .map(|(name, set)| Column { name: name.as_ref().to_string(), vocab: Vocab::from_values(set) })
            .collect();
        let mut rows = Vec::with_capacity(raw_rows.len() * n);
        for (r, raw) in raw_rows.iter().enumerate() {
            for (col, v) in columns.iter().zip(raw) {
                let idx = col.vocab.encode(v).ok_or_else(|| Error::UnknownValue {
                    row: Some(r),
                    column: col.name.clone(),
                    value: v.clone(),
                })?;
                rows.push(idx);
            }
        }
        Table::new(name, columns, rows)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn vocab_sizes(&self) -> Vec<usize> {
        self.columns.iter().map(|c| c.vocab.size()).collect()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let n = self.n_cols();
        &self.rows[i * n..(i + 1) * n]
    }

    /// All rows, row-major.
    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.rows.chunks_exact(self.n_cols())
    }

    pub fn encode_row<S: AsRef<str>>(&self, raw: &[S]) -> Result<Vec<u32>> {
        if raw.len() != self.n_cols() {
            return Err(Error::ShapeMismatch { context: "encode_row", expected: self.n_cols(), found: raw.len() });
        }
        self.columns
            .iter()
            .zip(raw)
            .map(|(col, v)| {
                col.vocab.encode(v.as_ref()).ok_or_else(|| Error::UnknownValue {
                    row: None,
                    column: col.name.clone(),
                    value: v.as_ref().to_string(),
                })
            })
            .collect()
    }

    /// Decodes an index row; MASK indices decode to the sentinel string.
    pub fn decode_row(&self, indices: &[u32]) -> Result<Vec<String>> {
        if indices.len() != self.n_cols() {
            return Err(Error::ShapeMismatch { context: "decode_row", expected: self.n_cols(), found: indices.len() });
        }
        self.columns
            .iter()
            .zip(indices)
            .map(|(col, &i)| {
                col.vocab.decode(i).map(ToString::to_string).ok_or_else(|| Error::IndexOutOfRange {
                    column: col.name.clone(),
                    index: i,
                    limit: col.vocab.mask_index(),
                })
            })
            .collect()
    }
}
