use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Decoded form of a MASK index.
pub const MASK_SENTINEL: &str = "⟨MASK⟩";

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
enum Key<'a> {
    Empty,
    Num(f64),
    Text(&'a str),
}

fn key_cmp(a: &Key<'_>, b: &Key<'_>) -> Ordering {
    match (a, b) {
        (Key::Num(x), Key::Num(y)) => x.total_cmp(y),
        (Key::Text(x), Key::Text(y)) => x.cmp(y),
        _ => rank(a).cmp(&rank(b)),
    }
}

fn rank(k: &Key<'_>) -> u8 {
    match k {
        Key::Empty => 0,
        Key::Num(_) => 1,
        Key::Text(_) => 2,
    }
}

fn parse_num(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Sorted dictionary of the distinct raw values of one column.
///
/// A column is numeric when every non-empty value parses as a finite number;
/// numeric columns sort by value, all others lexicographically. The empty
/// string is an ordinary value and sorts first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocab {
    values: Vec<String>,
    numeric: bool,
}

impl Vocab {
    pub fn from_values<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let distinct: BTreeSet<String> = values.into_iter().map(|s| s.as_ref().to_string()).collect();
        let numeric = is_numeric(distinct.iter().map(String::as_str));
        let mut values: Vec<String> = distinct.into_iter().collect();
        values.sort_by(|a, b| natural_cmp(numeric, a, b));
        Vocab { values, numeric }
    }

    /// Builds a vocab from values already in natural order; rejects
    /// duplicates and out-of-order input.
    pub fn from_sorted(values: Vec<String>) -> Result<Self> {
        let numeric = is_numeric(values.iter().map(String::as_str));
        for w in values.windows(2) {
            if natural_cmp(numeric, &w[0], &w[1]) != Ordering::Less {
                return Err(Error::InvalidVocab(format!(
                    "values `{}` and `{}` are not strictly increasing",
                    w[0], w[1]
                )));
            }
        }
        Ok(Vocab { values, numeric })
    }

    /// Vocab over the integers `0..size`, as used by synthetic tables.
    pub fn integer_range(size: usize) -> Self {
        Vocab { values: (0..size).map(|v| v.to_string()).collect(), numeric: size > 0 }
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn mask_index(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn is_numeric(&self) -> bool {
        self.numeric
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn encode(&self, raw: &str) -> Option<u32> {
        self.values.binary_search_by(|v| natural_cmp(self.numeric, v, raw)).ok().map(|i| i as u32)
    }

    /// Decodes an index; `mask_index` decodes to [`MASK_SENTINEL`].
    pub fn decode(&self, index: u32) -> Option<&str> {
        match (index as usize).cmp(&self.values.len()) {
            Ordering::Less => Some(&self.values[index as usize]),
            Ordering::Equal => Some(MASK_SENTINEL),
            Ordering::Greater => None,
        }
    }

    /// Number of values strictly below `literal` in natural order.
    ///
    /// Comparison ignores the lexicographic tie-break, so `1` and `1.0` in a
    /// numeric column compare equal.
    pub fn count_less(&self, literal: &str) -> usize {
        let lit = key(self.numeric, literal);
        self.values.partition_point(|v| key_cmp(&key(self.numeric, v), &lit) == Ordering::Less)
    }

    /// Number of values less than or equal to `literal` in natural order.
    pub fn count_less_equal(&self, literal: &str) -> usize {
        let lit = key(self.numeric, literal);
        self.values.partition_point(|v| key_cmp(&key(self.numeric, v), &lit) != Ordering::Greater)
    }
}

fn is_numeric<'a>(mut values: impl Iterator<Item = &'a str>) -> bool {
    let mut any = false;
    let all = values.all(|v| {
        if v.is_empty() {
            true
        } else {
            any = true;
            parse_num(v).is_some()
        }
    });
    all && any
}

fn key(numeric: bool, s: &str) -> Key<'_> {
    if s.is_empty() {
        Key::Empty
    } else if numeric {
        parse_num(s).map_or(Key::Text(s), Key::Num)
    } else {
        Key::Text(s)
    }
}

fn natural_cmp(numeric: bool, a: &str, b: &str) -> Ordering {
    key_cmp(&key(numeric, a), &key(numeric, b)).then_with(|| a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn sorts_numeric_columns_by_value() {
        let v = Vocab::from_values(["10", "9", "100", "-1"]);
        assert!(v.is_numeric());
        assert_eq!(v.values(), &["-1", "9", "10", "100"]);
        assert_eq!(v.encode("10"), Some(2));
    }

    #[test]
    fn mixed_columns_sort_lexicographically() {
        let v = Vocab::from_values(["b", "a", "10", "9"]);
        assert!(!v.is_numeric());
        assert_eq!(v.values(), &["10", "9", "a", "b"]);
    }

    #[test]
    fn empty_string_is_a_regular_value() {
        let v = Vocab::from_values(["3", "", "1"]);
        assert!(v.is_numeric());
        assert_eq!(v.values(), &["", "1", "3"]);
        assert_eq!(v.encode(""), Some(0));
    }

    #[test]
    fn mask_decodes_to_sentinel() {
        let v = Vocab::from_values(["a", "b"]);
        assert_eq!(v.mask_index(), 2);
        assert_eq!(v.decode(2), Some(MASK_SENTINEL));
        assert_eq!(v.decode(3), None);
    }

    #[test]
    fn literal_bounds_follow_numeric_order() {
        let v = Vocab::from_values(["1", "5", "7", "20"]);
        assert_eq!(v.count_less("5"), 1);
        assert_eq!(v.count_less_equal("5"), 2);
        assert_eq!(v.count_less_equal("6"), 2);
        assert_eq!(v.count_less("100"), 4);
        assert_eq!(v.count_less_equal("5.0"), 2);
    }

    #[test]
    fn from_sorted_rejects_disorder() {
        assert!(Vocab::from_sorted(vec!["b".into(), "a".into()]).is_err());
        assert!(Vocab::from_sorted(vec!["a".into(), "a".into()]).is_err());
        assert!(Vocab::from_sorted(vec!["2".into(), "10".into()]).is_ok());
    }
}
