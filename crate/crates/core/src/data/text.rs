use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use super::{Column, Table, Vocab};
use crate::{Error, Result};

/// Padding symbol for strings shorter than the table width. It sorts first,
/// so its index in the shared character vocab is 0.
pub const PAD_CHAR: char = '\0';

/// Strings stored as a fixed-width table over one shared character vocab.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextTable {
    table: Table,
    width: usize,
}

impl TextTable {
    /// Truncates or pads every string to `width` characters.
    pub fn from_strings<S: AsRef<str>>(name: impl Into<String>, strings: &[S], width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidSpec("text width must be positive".into()));
        }
        if strings.is_empty() {
            return Err(Error::EmptyTable);
        }
        let mut chars: BTreeSet<char> = BTreeSet::new();
        chars.insert(PAD_CHAR);
        for s in strings {
            if s.as_ref().contains(PAD_CHAR) {
                return Err(Error::InvalidSpec("strings may not contain NUL".into()));
            }
            chars.extend(s.as_ref().chars().take(width));
        }
        let vocab = Vocab::from_values(chars.iter().map(|c| c.to_string()));
        let mut rows = Vec::with_capacity(strings.len() * width);
        for s in strings {
            let mut len = 0;
            for c in s.as_ref().chars().take(width) {
                let mut buf = [0u8; 4];
                rows.push(vocab.encode(c.encode_utf8(&mut buf)).expect("char collected above"));
                len += 1;
            }
            rows.extend(core::iter::repeat_n(0, width - len));
        }
        let columns = (0..width).map(|i| Column { name: format!("pos{i}"), vocab: vocab.clone() }).collect();
        Ok(TextTable { table: Table::new(name, columns, rows)?, width })
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn vocab(&self) -> &Vocab {
        &self.table.columns()[0].vocab
    }

    pub fn pad_index(&self) -> u32 {
        0
    }

    /// Encodes a pattern; every character must be a known, non-PAD symbol.
    pub fn encode_pattern(&self, pattern: &str) -> Result<Vec<u32>> {
        let vocab = self.vocab();
        pattern
            .chars()
            .map(|c| {
                let mut buf = [0u8; 4];
                match vocab.encode(c.encode_utf8(&mut buf)) {
                    Some(i) if i != self.pad_index() => Ok(i),
                    _ => Err(Error::UnknownValue { row: None, column: "pattern".into(), value: c.to_string() }),
                }
            })
            .collect()
    }

    /// Decodes row `i` up to its first PAD.
    pub fn decode_string(&self, i: usize) -> String {
        let vocab = self.vocab();
        self.table
            .row(i)
            .iter()
            .take_while(|&&c| c != self.pad_index())
            .map(|&c| vocab.decode(c).unwrap_or("?"))
            .collect()
    }

    /// Fraction of stored strings containing `pattern` (exact scan).
    pub fn contains_fraction(&self, pattern: &[u32]) -> f64 {
        let hits = self.table.iter_rows().filter(|r| contains(r, pattern, Some(self.pad_index()))).count();
        hits as f64 / self.table.n_rows() as f64
    }
}

/// Whether `pattern` occurs in `row` before the first `pad` symbol.
pub(crate) fn contains(row: &[u32], pattern: &[u32], pad: Option<u32>) -> bool {
    let end = pad.and_then(|p| row.iter().position(|&c| c == p)).unwrap_or(row.len());
    !pattern.is_empty() && pattern.len() <= end && row[..end].windows(pattern.len()).any(|w| w == pattern)
}

const SYLLABLES: &[&str] = &[
    "ba", "ko", "ri", "tes", "mun", "da", "lo", "zen", "qu", "vix", "pra", "el", "on", "sy", "ta", "gor", "ni", "fe",
    "lux", "ar",
];
const TLDS: &[&str] = &[".com", ".org", ".net", ".edu", ".io", ".de", ".co.uk"];
const SEGMENTS: &[&str] = &["data", "files", "view", "doi", "item", "pub", "x", "archive", "api", "q"];

fn skewed<'a, R: Rng + ?Sized>(rng: &mut R, items: &[&'a str]) -> &'a str {
    let u: f64 = rng.random();
    items[((u * u * u) * items.len() as f64) as usize % items.len()]
}

fn word<R: Rng + ?Sized>(rng: &mut R, out: &mut String) {
    for _ in 0..rng.random_range(1..=3) {
        out.push_str(skewed(rng, SYLLABLES));
    }
}

/// Generates URL-like strings with skewed hosts, TLDs and path segments.
pub fn synth_urls<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<String> {
    (0..n)
        .map(|_| {
            let mut s = String::new();
            s.push_str(if rng.random_bool(0.7) { "http://" } else { "https://" });
            if rng.random_bool(0.5) {
                s.push_str("www.");
            }
            word(rng, &mut s);
            s.push_str(skewed(rng, TLDS));
            for _ in 0..rng.random_range(0..=3) {
                s.push('/');
                if rng.random_bool(0.6) {
                    s.push_str(skewed(rng, SEGMENTS));
                } else {
                    word(rng, &mut s);
                }
            }
            if rng.random_bool(0.3) {
                s.push_str("?id=");
                let id: u32 = rng.random_range(0..10_000);
                s.push_str(&id.to_string());
            }
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn pads_and_truncates() {
        let t = TextTable::from_strings("t", &["ab", "abcdef"], 4).unwrap();
        assert_eq!(t.vocab().values()[0], "\0");
        assert_eq!(t.decode_string(0), "ab");
        assert_eq!(t.decode_string(1), "abcd");
        assert_eq!(t.table().row(0)[2..], [0, 0]);
    }

    #[test]
    fn containment_stops_at_pad() {
        assert!(contains(&[1, 2, 1, 2], &[2, 1], Some(0)));
        assert!(!contains(&[1, 0, 1, 2], &[1, 2], Some(0)));
        assert!(!contains(&[1, 2], &[1, 2, 3], None));
    }

    #[test]
    fn patterns_reject_unknown_characters() {
        let t = TextTable::from_strings("t", &["abc"], 4).unwrap();
        assert_eq!(t.encode_pattern("bc").unwrap(), [2, 3]);
        assert!(t.encode_pattern("bz").is_err());
        assert!(t.encode_pattern("\0").is_err());
    }

    #[test]
    fn url_corpus_is_seeded() {
        let a = synth_urls(50, &mut crate::seed::StreamRng::seed_from_u64(1));
        let b = synth_urls(50, &mut crate::seed::StreamRng::seed_from_u64(1));
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.starts_with("http")));
    }
}
