use alloc::format;
use alloc::vec::Vec;

use crate::data::TextTable;
use crate::{Error, Result};

/// Character indices to search for, plus the PAD index that ends a string
/// (`None` when the alphabet has no padding).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    chars: Vec<u32>,
    pad: Option<u32>,
}

impl Pattern {
    pub fn new(chars: Vec<u32>, vocab_size: usize, pad: Option<u32>) -> Result<Self> {
        if chars.is_empty() {
            return Err(Error::InvalidSpec("empty pattern".into()));
        }
        if let Some(&c) = chars.iter().find(|&&c| c as usize >= vocab_size || Some(c) == pad) {
            return Err(Error::InvalidSpec(format!("pattern character index {c} is PAD, MASK or unknown")));
        }
        Ok(Pattern { chars, pad })
    }

    /// Encodes `text` with the table's character vocab.
    pub fn encode(table: &TextTable, text: &str) -> Result<Self> {
        let chars = table.encode_pattern(text)?;
        Self::new(chars, table.vocab().size(), Some(table.pad_index()))
    }

    pub fn chars(&self) -> &[u32] {
        &self.chars
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn pad(&self) -> Option<u32> {
        self.pad
    }

    /// Whether the pattern occurs in `row` starting exactly at `start`
    /// (never past the first PAD).
    pub fn occurs_at(&self, row: &[u32], start: usize) -> bool {
        start + self.chars.len() <= row.len() && row[start..start + self.chars.len()] == self.chars[..]
    }

    /// Whether `row` contains the pattern before its first PAD.
    pub fn found_in(&self, row: &[u32]) -> bool {
        crate::data::contains(row, &self.chars, self.pad)
    }
}
